/** Shared types mirroring the annotation service wire formats. */

export type BandLabel = 'natural' | 'synthetic' | 'text';
export type CropLabel = 'natural' | 'artificial';

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface LabeledRect extends Rect {
  label: BandLabel;
}

export interface FrameInfo {
  id: string;
  width: number;
  height: number;
}

export interface ServerBand extends Rect {
  index: number;
}
