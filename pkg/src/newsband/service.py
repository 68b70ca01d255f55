"""HTTP service behind the annotation UI.

Serves frame images and their low-level Hough bands, accepts ground-truth
rectangle sets (written as canonical band files) and per-band dataset
labels (written as image crops under natural/ or artificial/). Writes are
serialized per frame id; source frames are never touched.
"""

import io
import os
import threading
from typing import List, Literal

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from PIL import Image
from pydantic import BaseModel, Field

from .band_detection import Band
from .config import PipelineConfig
from .groundtruth import format_bands, load_bands, parse_bands
from .imaging import load_image
from .pipeline import crop_band, hough_bands_for_dataset

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class RectIn(BaseModel):
    label: Literal["natural", "synthetic", "text"]
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)


class AnnotationsBody(BaseModel):
    annotations: List[RectIn]


class LabelBody(BaseModel):
    label: Literal["natural", "artificial"]


class _FrameStore:
    def __init__(self, frames_dir, cfg: PipelineConfig):
        self.frames_dir = frames_dir
        self.cfg = cfg
        self._frames = {}
        self._bands = {}
        self._locks = {}
        self._global_lock = threading.Lock()

    def list_ids(self):
        names = sorted(
            f for f in os.listdir(self.frames_dir)
            if f.lower().endswith(IMAGE_SUFFIXES))
        return [os.path.splitext(f)[0] for f in names]

    def path_for(self, frame_id):
        for suffix in IMAGE_SUFFIXES:
            candidate = os.path.join(self.frames_dir, frame_id + suffix)
            if os.path.exists(candidate):
                return candidate
        return None

    def frame(self, frame_id):
        if frame_id not in self._frames:
            path = self.path_for(frame_id)
            if path is None:
                return None
            self._frames[frame_id] = load_image(path)
        return self._frames[frame_id]

    def bands(self, frame_id):
        if frame_id not in self._bands:
            frame = self.frame(frame_id)
            if frame is None:
                return None
            self._bands[frame_id] = hough_bands_for_dataset(frame, self.cfg)
        return self._bands[frame_id]

    def lock(self, frame_id) -> threading.Lock:
        with self._global_lock:
            if frame_id not in self._locks:
                self._locks[frame_id] = threading.Lock()
            return self._locks[frame_id]


def create_app(frames_dir, truth_dir, dataset_dir, cfg: PipelineConfig,
               frontend_dir=None) -> FastAPI:
    os.makedirs(truth_dir, exist_ok=True)
    os.makedirs(os.path.join(dataset_dir, "natural"), exist_ok=True)
    os.makedirs(os.path.join(dataset_dir, "artificial"), exist_ok=True)
    store = _FrameStore(frames_dir, cfg)
    app = FastAPI(title="newsband annotation service")

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def not_found(frame_id):
        return JSONResponse(status_code=404,
                            content={"detail": f"unknown frame {frame_id!r}"})

    @app.get("/frames")
    def list_frames():
        out = []
        for frame_id in store.list_ids():
            frame = store.frame(frame_id)
            out.append({"id": frame_id,
                        "width": int(frame.shape[1]),
                        "height": int(frame.shape[0])})
        return out

    @app.get("/frames/{frame_id}/image")
    def frame_image(frame_id: str):
        frame = store.frame(frame_id)
        if frame is None:
            return not_found(frame_id)
        buf = io.BytesIO()
        Image.fromarray(frame).save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/frames/{frame_id}/bands")
    def frame_bands(frame_id: str):
        bands = store.bands(frame_id)
        if bands is None:
            return not_found(frame_id)
        return {"bands": [
            {"index": i, "x": b.x, "y": b.y, "w": b.w, "h": b.h}
            for i, b in enumerate(bands)
        ]}

    @app.get("/frames/{frame_id}/annotations")
    def get_annotations(frame_id: str):
        if store.frame(frame_id) is None:
            return not_found(frame_id)
        path = os.path.join(truth_dir, frame_id + ".txt")
        if not os.path.exists(path):
            return {"annotations": []}
        bands = load_bands(path)
        return {"annotations": [
            {"label": b.label, "x": b.x, "y": b.y, "w": b.w, "h": b.h}
            for b in bands
        ]}

    @app.post("/frames/{frame_id}/annotations")
    def post_annotations(frame_id: str, body: AnnotationsBody):
        frame = store.frame(frame_id)
        if frame is None:
            return not_found(frame_id)
        height, width = frame.shape[:2]
        bands = []
        for r in body.annotations:
            if r.x + r.w > width or r.y + r.h > height:
                return JSONResponse(
                    status_code=400,
                    content={"detail": f"rectangle {r.x},{r.y} {r.w}x{r.h} "
                                       f"outside the {width}x{height} frame"})
            bands.append(Band(r.x, r.y, r.w, r.h, label=r.label))
        text = format_bands(bands)
        path = os.path.join(truth_dir, frame_id + ".txt")
        with store.lock(frame_id):
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        canonical = parse_bands(text)
        return {"written": path, "annotations": [
            {"label": b.label, "x": b.x, "y": b.y, "w": b.w, "h": b.h}
            for b in canonical
        ]}

    @app.post("/frames/{frame_id}/bands/{band_index}/label")
    def post_band_label(frame_id: str, band_index: int, body: LabelBody):
        frame = store.frame(frame_id)
        if frame is None:
            return not_found(frame_id)
        bands = store.bands(frame_id)
        if not 0 <= band_index < len(bands):
            return JSONResponse(
                status_code=409,
                content={"detail": f"band index {band_index} out of range "
                                   f"(frame has {len(bands)} bands)"})
        crop = crop_band(frame, bands[band_index])
        path = os.path.join(dataset_dir, body.label,
                            f"{frame_id}_band{band_index:03d}.png")
        with store.lock(frame_id):
            Image.fromarray(np.ascontiguousarray(crop)).save(path)
        return {"written": path}

    if frontend_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")

    return app
