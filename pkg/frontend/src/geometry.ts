/** Rectangle helpers for drag capture and canonical ordering. */

import type { LabeledRect, Rect } from './types.js';

/** Rectangle spanned by two drag corners, any orientation. */
export function rectFromCorners(
  x0: number, y0: number, x1: number, y1: number,
): Rect {
  const x = Math.min(x0, x1);
  const y = Math.min(y0, y1);
  return { x, y, w: Math.abs(x1 - x0), h: Math.abs(y1 - y0) };
}

/** Clamp a rectangle into a width x height image; may become zero-area. */
export function clampRect(rect: Rect, width: number, height: number): Rect {
  const x0 = Math.min(Math.max(rect.x, 0), width);
  const y0 = Math.min(Math.max(rect.y, 0), height);
  const x1 = Math.min(Math.max(rect.x + rect.w, 0), width);
  const y1 = Math.min(Math.max(rect.y + rect.h, 0), height);
  return { x: x0, y: y0, w: x1 - x0, h: y1 - y0 };
}

export function roundRect(rect: Rect): Rect {
  const x = Math.round(rect.x);
  const y = Math.round(rect.y);
  return {
    x,
    y,
    w: Math.round(rect.x + rect.w) - x,
    h: Math.round(rect.y + rect.h) - y,
  };
}

export function hasArea(rect: Rect): boolean {
  return rect.w > 0 && rect.h > 0;
}

/** Server order: sorted by (y, x); ties keep relative input order. */
export function canonicalOrder<T extends Rect>(rects: readonly T[]): T[] {
  return [...rects].sort((a, b) => a.y - b.y || a.x - b.x);
}

export function sameRect(a: LabeledRect, b: LabeledRect): boolean {
  return (
    a.label === b.label && a.x === b.x && a.y === b.y && a.w === b.w && a.h === b.h
  );
}

export function sameRectList(
  a: readonly LabeledRect[], b: readonly LabeledRect[],
): boolean {
  return a.length === b.length && a.every((r, i) => sameRect(r, b[i]));
}
