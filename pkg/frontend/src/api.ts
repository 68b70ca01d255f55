/** Thin client for the annotation service endpoints. */

import type { CropLabel, FrameInfo, LabeledRect, ServerBand } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && body.detail) detail = JSON.stringify(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return resp;
}

export class AnnotationApi {
  constructor(
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly base: string = '',
  ) {}

  async listFrames(): Promise<FrameInfo[]> {
    const resp = await expectOk(await this.fetchFn(`${this.base}/frames`));
    return resp.json();
  }

  imageUrl(frameId: string): string {
    return `${this.base}/frames/${encodeURIComponent(frameId)}/image`;
  }

  async getBands(frameId: string): Promise<ServerBand[]> {
    const resp = await expectOk(
      await this.fetchFn(`${this.base}/frames/${encodeURIComponent(frameId)}/bands`),
    );
    const body = await resp.json();
    return body.bands;
  }

  async getAnnotations(frameId: string): Promise<LabeledRect[]> {
    const resp = await expectOk(
      await this.fetchFn(
        `${this.base}/frames/${encodeURIComponent(frameId)}/annotations`,
      ),
    );
    const body = await resp.json();
    return body.annotations;
  }

  async saveAnnotations(
    frameId: string, annotations: readonly LabeledRect[],
  ): Promise<LabeledRect[]> {
    const resp = await expectOk(
      await this.fetchFn(
        `${this.base}/frames/${encodeURIComponent(frameId)}/annotations`,
        {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ annotations }),
        },
      ),
    );
    const body = await resp.json();
    return body.annotations;
  }

  async labelBand(
    frameId: string, bandIndex: number, label: CropLabel,
  ): Promise<string> {
    const resp = await expectOk(
      await this.fetchFn(
        `${this.base}/frames/${encodeURIComponent(frameId)}/bands/${bandIndex}/label`,
        {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ label }),
        },
      ),
    );
    const body = await resp.json();
    return body.written;
  }
}
