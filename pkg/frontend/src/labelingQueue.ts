/** State machine of the one-band-at-a-time dataset labeling tool.
 *
 * Bands arrive in server order (bottom-left first). The cursor advances
 * only after the server acknowledges a label, so a band can neither be
 * skipped nor labeled twice; a failed POST leaves the cursor in place.
 */

import type { AnnotationApi } from './api.js';
import type { CropLabel, ServerBand } from './types.js';

export class LabelingQueue {
  readonly frameId: string;
  readonly bands: readonly ServerBand[];
  private cursor = 0;
  private readonly assigned = new Map<number, CropLabel>();
  private busy = false;
  lastError: string | null = null;

  constructor(frameId: string, bands: readonly ServerBand[]) {
    this.frameId = frameId;
    this.bands = bands;
  }

  current(): ServerBand | null {
    return this.cursor < this.bands.length ? this.bands[this.cursor] : null;
  }

  isComplete(): boolean {
    return this.cursor >= this.bands.length;
  }

  isBusy(): boolean {
    return this.busy;
  }

  progress(): { labeled: number; total: number } {
    return { labeled: this.assigned.size, total: this.bands.length };
  }

  /** Label counts for the completion summary. */
  summary(): Record<CropLabel, number> {
    const counts: Record<CropLabel, number> = { natural: 0, artificial: 0 };
    for (const label of this.assigned.values()) counts[label] += 1;
    return counts;
  }

  labels(): ReadonlyMap<number, CropLabel> {
    return this.assigned;
  }

  /** POST the label of the current band; advance only on acknowledgment. */
  async labelCurrent(api: AnnotationApi, label: CropLabel): Promise<boolean> {
    if (this.busy || this.isComplete()) return false;
    const band = this.bands[this.cursor];
    this.busy = true;
    try {
      await api.labelBand(this.frameId, band.index, label);
      this.assigned.set(band.index, label);
      this.cursor += 1;
      this.lastError = null;
      return true;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      return false;
    } finally {
      this.busy = false;
    }
  }
}
