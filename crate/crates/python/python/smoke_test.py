"""Smoke test for the faircrop extension module.

Build and run from the workspace root:

    cargo build --release -p faircrop-python
    cp target/release/libfaircrop.so crates/python/python/faircrop.so
    python3 crates/python/python/smoke_test.py
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import faircrop  # noqa: E402


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAILED: {what}")
    print(f"ok  {what}")


def main():
    # a bright square left of centre on a dark field
    w, h = 120, 80
    px = bytearray()
    for y in range(h):
        for x in range(w):
            v = 230 if 20 <= x < 40 and 30 <= y < 50 else 15
            px += bytes((v, v, v))
    img = faircrop.Image.from_rgb(w, h, bytes(px))
    check((img.width, img.height) == (w, h), "image from raw RGB")

    smap = faircrop.saliency(img, backend="contrast", grid_step=8)
    (fx, fy), score = smap.max_point()
    check(smap.grid_w == 15 and smap.grid_h == 10, "grid dims")
    check(12 <= fx < 48 and 22 <= fy < 58 and score > 0, f"argmax {fx},{fy} on the square")
    check(not smap.is_symmetric(), "asymmetric map")
    check(len(smap.regions()) >= 1, "regions")

    again = faircrop.SaliencyMap.from_pfm(smap.pfm(), w, h)
    check(again.pfm() == smap.pfm(), "PFM round trip")

    rect = faircrop.crop_around_focal(w, h, (fx, fy), "1:1")
    check(rect[2] == rect[3] == h and rect[0] <= fx < rect[0] + rect[2], f"square crop {rect}")
    check(faircrop.center_crop(w, h, "1:1") == (20, 0, 80, 80), "centre crop")

    plan = faircrop.plan_crops(smap, ["1:1", "16:9"], strategy="argmax")
    check(plan["focal"] == {"x": fx, "y": fy} and len(plan["specs"]) == 2, "crop plan")
    crops = faircrop.crop(img, ["1:1", "3:1"], backend="contrast")
    check([(c.width, c.height) for c in crops] == [(80, 80), (120, 40)], "pipeline crops")
    check(crops[0].png()[:4] == b"\x89PNG", "PNG encode")
    padded = faircrop.crop(img, ["1:1"], strategy="pad")
    check((padded[0].width, padded[0].height) == (120, 120), "padding")

    lo, hi = faircrop.confidence_interval(0.5, 10000)
    check(abs((hi - lo) / 2 - 0.0098) < 1e-4, "CI half-width at n=10000")
    ratio, flagged = faircrop.parity(0.7)
    check(abs(ratio - 3 / 7) < 1e-12 and flagged, "parity verdict")

    try:
        faircrop.crop_around_focal(w, h, (fx, fy), "0:1")
    except ValueError:
        check(True, "bad ratio raises ValueError")
    else:
        check(False, "bad ratio raises ValueError")

    with tempfile.TemporaryDirectory() as tmp:
        manifest = faircrop.synthetic_corpus(tmp, [("light", 225, 6), ("dark", 60, 6)], seed=3)
        corpus = faircrop.Corpus.load(manifest)
        check(len(corpus) == 12 and corpus.subgroups == ["light", "dark"], "synthetic corpus")
        report = corpus.audit("light", "dark", trials=400, backend="contrast", seed=1)
        check(report["p_favored_a"] > 0.9 and report["disparate_impact_flag"], "attach audit favours light")
        same = corpus.audit("light", "dark", trials=400, backend="contrast", seed=1)
        check(same == report, "audit reproducible")
        exhaustive = corpus.audit("light", "dark", variant="noattach", backend="contrast")
        check(exhaustive["n"] == 36, "exhaustive audit")
        gaze = corpus.gaze({"sample_size": 3}, backend="contrast")
        check([g["group"] for g in gaze["groups"]] == ["light", "dark"], "gaze report")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
