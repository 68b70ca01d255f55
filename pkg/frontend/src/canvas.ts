/** Canvas rendering of the frame image plus rectangle overlays. */

import type { LabeledRect, ServerBand } from './types.js';

export const LABEL_COLORS: Record<string, string> = {
  natural: '#3fae4a',
  synthetic: '#e07b39',
  text: '#4f7bdc',
};

export class FrameCanvas {
  private readonly ctx: CanvasRenderingContext2D;
  private image: HTMLImageElement | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext('2d');
    if (!ctx) throw new Error('canvas 2d context unavailable');
    this.ctx = ctx;
  }

  async loadImage(url: string, width: number, height: number): Promise<void> {
    this.canvas.width = width;
    this.canvas.height = height;
    this.image = await new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () => resolve(img);
      img.onerror = () => reject(new Error(`cannot load ${url}`));
      img.src = url;
    });
  }

  /** Canvas-space coordinates of a mouse event. */
  eventPoint(event: MouseEvent): { x: number; y: number } {
    const bounds = this.canvas.getBoundingClientRect();
    const sx = this.canvas.width / bounds.width;
    const sy = this.canvas.height / bounds.height;
    return {
      x: (event.clientX - bounds.left) * sx,
      y: (event.clientY - bounds.top) * sy,
    };
  }

  draw(rects: readonly LabeledRect[], preview: LabeledRect | null = null,
       highlight: ServerBand | null = null): void {
    const { ctx } = this;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.image) ctx.drawImage(this.image, 0, 0);
    for (const rect of rects) {
      ctx.strokeStyle = LABEL_COLORS[rect.label] ?? '#999999';
      ctx.lineWidth = 2;
      ctx.strokeRect(rect.x + 0.5, rect.y + 0.5, rect.w - 1, rect.h - 1);
      ctx.fillStyle = ctx.strokeStyle;
      ctx.font = '12px sans-serif';
      ctx.fillText(rect.label, rect.x + 4, rect.y + 14);
    }
    if (preview) {
      ctx.setLineDash([6, 4]);
      ctx.strokeStyle = LABEL_COLORS[preview.label] ?? '#999999';
      ctx.strokeRect(preview.x + 0.5, preview.y + 0.5, preview.w, preview.h);
      ctx.setLineDash([]);
    }
    if (highlight) {
      ctx.strokeStyle = '#f3d03e';
      ctx.lineWidth = 3;
      ctx.strokeRect(highlight.x + 1, highlight.y + 1,
                     highlight.w - 2, highlight.h - 2);
    }
  }
}
