/** Wires the two annotation tools to the page. */

import { AnnotationApi } from './api.js';
import { AnnotationSession } from './annotationSession.js';
import { FrameCanvas } from './canvas.js';
import { keydownListener } from './keyboard.js';
import { LabelingQueue } from './labelingQueue.js';
import type { BandLabel, FrameInfo } from './types.js';

type Mode = 'mark' | 'label';

const api = new AnnotationApi();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class App {
  private frames: FrameInfo[] = [];
  private mode: Mode = 'mark';
  private session: AnnotationSession | null = null;
  private queue: LabelingQueue | null = null;
  private canvas!: FrameCanvas;

  async start(): Promise<void> {
    this.canvas = new FrameCanvas(el<HTMLCanvasElement>('frame-canvas'));
    this.frames = await api.listFrames();
    const picker = el<HTMLSelectElement>('frame-picker');
    picker.innerHTML = '';
    for (const frame of this.frames) {
      const option = document.createElement('option');
      option.value = frame.id;
      option.textContent = `${frame.id} (${frame.width}x${frame.height})`;
      picker.appendChild(option);
    }
    picker.onchange = () => void this.openFrame(picker.value);

    el<HTMLButtonElement>('mode-mark').onclick = () => void this.setMode('mark');
    el<HTMLButtonElement>('mode-label').onclick = () => void this.setMode('label');
    el<HTMLButtonElement>('save-btn').onclick = () => void this.save();
    el<HTMLButtonElement>('undo-btn').onclick = () => this.undo();
    for (const label of ['natural', 'synthetic', 'text'] as BandLabel[]) {
      el<HTMLButtonElement>(`label-${label}`).onclick = () => {
        this.session?.setLabel(label);
        this.refreshStatus();
      };
    }

    const canvasNode = el<HTMLCanvasElement>('frame-canvas');
    canvasNode.onmousedown = (e) => this.onMouse('down', e);
    canvasNode.onmousemove = (e) => this.onMouse('move', e);
    canvasNode.onmouseup = (e) => this.onMouse('up', e);

    document.addEventListener('keydown', keydownListener({
      n: () => void this.hotkey('natural'),
      a: () => void this.hotkey('artificial'),
      s: () => void this.save(),
      z: () => this.undo(),
    }));

    if (this.frames.length > 0) {
      picker.value = this.frames[0].id;
      await this.openFrame(this.frames[0].id);
    } else {
      this.status('no frames on the server');
    }
  }

  private frameInfo(id: string): FrameInfo {
    const info = this.frames.find((f) => f.id === id);
    if (!info) throw new Error(`unknown frame ${id}`);
    return info;
  }

  private async openFrame(id: string): Promise<void> {
    const info = this.frameInfo(id);
    await this.canvas.loadImage(api.imageUrl(id), info.width, info.height);
    this.session = new AnnotationSession(id, info.width, info.height);
    await this.session.load(api);
    this.queue = new LabelingQueue(id, await api.getBands(id));
    this.redraw();
  }

  private async setMode(mode: Mode): Promise<void> {
    this.mode = mode;
    this.redraw();
  }

  private onMouse(kind: 'down' | 'move' | 'up', event: MouseEvent): void {
    if (this.mode !== 'mark' || !this.session) return;
    const point = this.canvas.eventPoint(event);
    if (kind === 'down') this.session.beginDrag(point.x, point.y);
    if (kind === 'move') this.session.moveDrag(point.x, point.y);
    if (kind === 'up') this.session.endDrag();
    this.redraw();
  }

  private async hotkey(label: 'natural' | 'artificial'): Promise<void> {
    if (this.mode !== 'label' || !this.queue) return;
    await this.queue.labelCurrent(api, label);
    this.redraw();
  }

  private async save(): Promise<void> {
    if (this.mode !== 'mark' || !this.session) return;
    await this.session.save(api);
    this.redraw();
  }

  private undo(): void {
    if (this.mode !== 'mark' || !this.session) return;
    this.session.undo();
    this.redraw();
  }

  private status(text: string): void {
    el<HTMLSpanElement>('status-line').textContent = text;
  }

  private refreshStatus(): void {
    if (this.mode === 'mark' && this.session) {
      const s = this.session;
      const sync = s.syncError ? `error: ${s.syncError}`
        : s.dirty ? 'unsaved changes' : 'saved';
      this.status(`marking with label "${s.currentLabel}" | `
        + `${s.rects.length} rectangles | ${sync} `
        + `(hotkeys: s save, z undo)`);
    } else if (this.queue) {
      const q = this.queue;
      const p = q.progress();
      if (q.isComplete()) {
        const sum = q.summary();
        this.status(`done: ${sum.natural} natural, ${sum.artificial} artificial`);
      } else {
        const err = q.lastError ? ` | error: ${q.lastError}` : '';
        this.status(`band ${p.labeled + 1}/${p.total} | press n (natural) `
          + `or a (artificial)${err}`);
      }
    }
  }

  private redraw(): void {
    if (this.mode === 'mark' && this.session) {
      this.canvas.draw(this.session.renderList(), this.session.dragPreview());
    } else if (this.queue) {
      this.canvas.draw([], null, this.queue.current());
    }
    this.refreshStatus();
  }
}

window.addEventListener('DOMContentLoaded', () => {
  new App().start().catch((err) => {
    const line = document.getElementById('status-line');
    if (line) line.textContent = `startup failed: ${err}`;
  });
});
