/** State machine of the ground-truth marking tool.
 *
 * Rectangles are captured corner to corner, clamped to the image, and
 * never persisted with zero area. The server is the source of truth:
 * saving replaces the local set with the canonically sorted set the
 * server acknowledges, and a failed save keeps every local rectangle.
 */

import type { AnnotationApi } from './api.js';
import {
  canonicalOrder,
  clampRect,
  hasArea,
  rectFromCorners,
  roundRect,
} from './geometry.js';
import type { BandLabel, LabeledRect } from './types.js';

interface DragState {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export class AnnotationSession {
  readonly frameId: string;
  readonly width: number;
  readonly height: number;
  rects: LabeledRect[] = [];
  currentLabel: BandLabel = 'natural';
  dirty = false;
  syncError: string | null = null;
  private drag: DragState | null = null;
  private undoStack: LabeledRect[][] = [];

  constructor(frameId: string, width: number, height: number) {
    this.frameId = frameId;
    this.width = width;
    this.height = height;
  }

  setLabel(label: BandLabel): void {
    this.currentLabel = label;
  }

  beginDrag(x: number, y: number): void {
    this.drag = { x0: x, y0: y, x1: x, y1: y };
  }

  moveDrag(x: number, y: number): void {
    if (this.drag) {
      this.drag.x1 = x;
      this.drag.y1 = y;
    }
  }

  /** Current drag rectangle for live preview, clamped to the image. */
  dragPreview(): LabeledRect | null {
    if (!this.drag) return null;
    const rect = clampRect(
      roundRect(rectFromCorners(this.drag.x0, this.drag.y0, this.drag.x1, this.drag.y1)),
      this.width,
      this.height,
    );
    return { ...rect, label: this.currentLabel };
  }

  /** Commit the drag; returns the rectangle or null when it had no area. */
  endDrag(): LabeledRect | null {
    const preview = this.dragPreview();
    this.drag = null;
    if (!preview || !hasArea(preview)) return null;
    this.undoStack.push([...this.rects]);
    this.rects.push(preview);
    this.dirty = true;
    this.syncError = null;
    return preview;
  }

  deleteRect(index: number): boolean {
    if (index < 0 || index >= this.rects.length) return false;
    this.undoStack.push([...this.rects]);
    this.rects.splice(index, 1);
    this.dirty = true;
    return true;
  }

  undo(): boolean {
    const previous = this.undoStack.pop();
    if (previous === undefined) return false;
    this.rects = previous;
    this.dirty = true;
    return true;
  }

  /** Rectangles in server (y, x) order; what the canvas paints. */
  renderList(): LabeledRect[] {
    return canonicalOrder(this.rects);
  }

  async save(api: AnnotationApi): Promise<boolean> {
    try {
      const canonical = await api.saveAnnotations(this.frameId, this.rects);
      this.rects = canonical;
      this.dirty = false;
      this.syncError = null;
      this.undoStack = [];
      return true;
    } catch (err) {
      this.syncError = err instanceof Error ? err.message : String(err);
      return false;
    }
  }

  async load(api: AnnotationApi): Promise<void> {
    this.rects = await api.getAnnotations(this.frameId);
    this.dirty = false;
    this.syncError = null;
    this.undoStack = [];
  }
}
