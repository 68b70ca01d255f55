/** Hotkey dispatch; ignores keystrokes aimed at form fields. */

export type KeyHandlers = Record<string, () => void>;

export function keydownListener(handlers: KeyHandlers) {
  return (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === 'INPUT' || target.tagName === 'TEXTAREA')) {
      return;
    }
    const handler = handlers[event.key.toLowerCase()];
    if (handler) {
      event.preventDefault();
      handler();
    }
  };
}
