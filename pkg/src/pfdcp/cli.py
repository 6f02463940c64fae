"""Command-line front end: ``pfdcp dehaze``, ``pfdcp eval`` and ``pfdcp synth``.

Exit status is 0 when every input was processed, 1 when some inputs failed
and 2 when the run was aborted.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .dcp import DehazeParams, dark_channel, dehaze_dcp, estimate_transmission
from .imgcore import load_image, save_image
from .metrics import EvalRecord, psnr, ssim
from .pyramid import INDOOR, OUTDOOR, pfdcp_stages
from .synth import smooth_transmission, synthesize_haze

log = logging.getLogger("pfdcp")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
CSV_HEADER = ["image_id", "psnr", "ssim", "wall_ms"]
PROFILES = {"indoor": INDOOR, "outdoor": OUTDOOR}

EXIT_OK, EXIT_PARTIAL, EXIT_ABORT = 0, 1, 2

_PARAM_TYPES = {f.name: f.type for f in dataclasses.fields(DehazeParams)}
_CONFIG_EXTRA = {"method", "profile"}


class UsageError(Exception):
    pass


# -- configuration -----------------------------------------------------------

def read_config(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARAM_TYPES and key not in _CONFIG_EXTRA:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_weights(text: str) -> tuple[float, float]:
    try:
        low, high = (float(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WLOW:WHIGH, got {text!r}")
    return low, high


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _parse_rgb(text: str) -> tuple[float, float, float]:
    try:
        r, g, b = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R,G,B, got {text!r}")
    return r, g, b


def resolve_settings(args: argparse.Namespace) -> tuple[str, DehazeParams]:
    """Merge defaults < config file < flags into a method name and parameters."""
    config = read_config(args.config) if args.config else {}

    method = args.method or config.get("method", "pfdcp")
    if method not in ("dcp", "pfdcp"):
        raise UsageError(f"unknown method {method!r}")

    values: dict[str, object] = {}
    for key, typ in _PARAM_TYPES.items():
        if key in config:
            try:
                values[key] = (int if typ in (int, "int") else float)(config[key])
            except ValueError:
                raise UsageError(f"bad value for {key}: {config[key]!r}")
    for key in ("patch", "omega", "t0", "gf_radius", "gf_eps", "top_fraction"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    config_weights = "fusion_low_weight" in values or "fusion_high_weight" in values
    profile = args.profile or config.get("profile")
    if profile is None:
        profile = "custom" if (args.weights or config_weights) else "indoor"
    if profile in PROFILES:
        if args.weights:
            raise UsageError("--weights needs --profile custom")
        values["fusion_low_weight"] = PROFILES[profile].low
        values["fusion_high_weight"] = PROFILES[profile].high
    elif profile == "custom":
        if args.weights:
            values["fusion_low_weight"], values["fusion_high_weight"] = args.weights
        elif not config_weights:
            raise UsageError("profile custom requires --weights WLOW:WHIGH")
    else:
        raise UsageError(f"unknown profile {profile!r}")

    try:
        return method, DehazeParams(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- helpers -------------------------------------------------------------------

def list_images(path: Path) -> list[Path]:
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise UsageError(f"no such file or directory: {path}")
    return sorted(p for p in path.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def run_method(img: np.ndarray, method: str, params: DehazeParams):
    """Dehaze one image; returns (dehazed, intermediates dict)."""
    if method == "pfdcp" and min(img.shape[:2]) < params.patch:
        log.warning("image %dx%d is smaller than the patch, falling back to DCP",
                    img.shape[1], img.shape[0])
        method = "dcp"
    if method == "dcp":
        dehazed, t, a = dehaze_dcp(img, params)
        maps = {
            "dark": dark_channel(img, params.patch),
            "t_raw": estimate_transmission(img, a, params),
            "t_final": t,
        }
        return dehazed, maps
    stages = pfdcp_stages(img, params)
    maps = {"dark": dark_channel(img, params.patch)}
    for k, t in enumerate(stages.refined):
        maps[f"t_level{k}"] = t
    maps["t_fused"] = stages.fused
    maps["t_final"] = stages.final
    return stages.dehazed, maps


def _map_ordered(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6f}"


def write_csv(records: list[EvalRecord], path: Path) -> None:
    """Per-image rows followed by a ``MEAN`` row."""
    rows = [[r.image_id, _fmt(r.psnr), _fmt(r.ssim), f"{r.wall_ms:.1f}"] for r in records]
    mean = lambda xs: float(np.mean(xs)) if xs else math.nan
    rows.append([
        "MEAN",
        _fmt(mean([r.psnr for r in records])),
        _fmt(mean([r.ssim for r in records])),
        f"{mean([r.wall_ms for r in records]):.1f}",
    ])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def pair_dataset(hazy_dir: Path, gt_dir: Path) -> tuple[list[tuple[Path, Path]], list[Path]]:
    """Match hazy images to ground truth by stem.

    The hazy stem is first truncated at its first underscore (RESIDE naming,
    e.g. ``1400_3.png`` -> ``1400``); if that finds nothing the full stem is
    tried. Hazy files that match no GT, or several, are returned as skipped.
    """
    by_stem: dict[str, list[Path]] = {}
    for p in list_images(gt_dir):
        by_stem.setdefault(p.stem, []).append(p)
    pairs, skipped = [], []
    for hazy in list_images(hazy_dir):
        matches = by_stem.get(hazy.stem.split("_", 1)[0]) or by_stem.get(hazy.stem) or []
        if len(matches) == 1:
            pairs.append((hazy, matches[0]))
        else:
            skipped.append(hazy)
    return pairs, skipped


def _match_size(gt: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    # SOTS indoor ground truth carries a border the hazy images lack
    gh, gw = gt.shape[:2]
    h, w = shape[:2]
    if (gh, gw) == (h, w):
        return gt
    if gh < h or gw < w:
        raise ValueError(f"ground truth {gw}x{gh} is smaller than hazy image {w}x{h}")
    top, left = (gh - h) // 2, (gw - w) // 2
    return gt[top:top + h, left:left + w]


# -- subcommands ----------------------------------------------------------------

def cmd_dehaze(args: argparse.Namespace) -> int:
    method, params = resolve_settings(args)
    inputs = list_images(Path(args.input))
    if not inputs:
        raise UsageError(f"no images found in {args.input}")
    out_dir = Path(args.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        log.error("cannot create output directory %s: %s", out_dir, exc)
        return EXIT_ABORT

    def work(path: Path):
        try:
            img = load_image(path)
        except (OSError, ValueError) as exc:
            log.error("skipping %s: %s", path, exc)
            return path, None, None
        start = time.perf_counter()
        dehazed, maps = run_method(img, method, params)
        return path, dehazed, (maps, (time.perf_counter() - start) * 1000.0)

    failures = 0
    for path, dehazed, extra in _map_ordered(work, inputs, args.threads):
        if dehazed is None:
            failures += 1
            continue
        maps, wall_ms = extra
        try:
            save_image(dehazed, out_dir / f"{path.stem}.png")
            if args.dump_intermediates:
                for name, m in maps.items():
                    save_image(m, out_dir / f"{path.stem}_{name}.png")
        except OSError as exc:
            log.error("%s", exc)
            return EXIT_ABORT
        print(f"{path.name}\t{wall_ms:.1f} ms")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    method, params = resolve_settings(args)
    pairs, skipped = pair_dataset(Path(args.hazy), Path(args.gt))
    for p in skipped:
        log.warning("no unique ground truth for %s, skipped", p.name)
    if not pairs:
        log.error("no hazy/ground-truth pairs found")
        return EXIT_ABORT

    def work(pair):
        hazy_path, gt_path = pair
        try:
            hazy = load_image(hazy_path)
            gt = _match_size(load_image(gt_path), hazy.shape)
        except (OSError, ValueError) as exc:
            log.error("skipping %s: %s", hazy_path.name, exc)
            return None
        start = time.perf_counter()
        dehazed, _ = run_method(hazy, method, params)
        wall_ms = (time.perf_counter() - start) * 1000.0
        return EvalRecord(hazy_path.stem, psnr(dehazed, gt), ssim(dehazed, gt), wall_ms)

    results = _map_ordered(work, pairs, args.threads)
    records = sorted((r for r in results if r is not None), key=lambda r: r.image_id)
    if not records:
        log.error("every pair failed")
        return EXIT_ABORT
    if args.csv:
        write_csv(records, Path(args.csv))

    mean_psnr = float(np.mean([r.psnr for r in records]))
    mean_ssim = float(np.mean([r.ssim for r in records]))
    print(f"{method} on {len(records)} images: PSNR {mean_psnr:.2f} dB, SSIM {mean_ssim:.4f}")
    failed = len(results) - len(records) + len(skipped)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    inputs = list_images(Path(args.clear))
    if not inputs:
        raise UsageError(f"no images found in {args.clear}")
    out_dir = Path(args.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        log.error("cannot create output directory %s: %s", out_dir, exc)
        return EXIT_ABORT

    rng = np.random.default_rng(args.seed)
    failures = 0
    for path in inputs:
        try:
            clear = load_image(path)
        except (OSError, ValueError) as exc:
            log.error("skipping %s: %s", path, exc)
            failures += 1
            continue

        if args.airlight is not None:
            a = np.array(args.airlight)
        else:
            a = rng.uniform(*args.airlight_range, size=3)
        meta = {"a_r": float(a[0]), "a_g": float(a[1]), "a_b": float(a[2])}

        if args.t_map is not None:
            t = smooth_transmission(*clear.shape[:2], rng, *args.t_map)
            map_name = f"{path.stem}_t.npy"
            meta["t_map"] = map_name
        elif args.t_const is not None:
            t = args.t_const
            meta["t_const"] = float(t)
        else:
            t = float(rng.uniform(*args.t_range))
            meta["t_const"] = t

        try:
            hazy = synthesize_haze(clear, a, t)
            save_image(hazy, out_dir / f"{path.stem}.png")
            if "t_map" in meta:
                np.save(out_dir / meta["t_map"], t)
            (out_dir / f"{path.stem}.txt").write_text("".join(f"{k}={v}\n" for k, v in meta.items()))
        except OSError as exc:
            log.error("%s", exc)
            return EXIT_ABORT
        except ValueError as exc:
            log.error("skipping %s: %s", path, exc)
            failures += 1
    return EXIT_PARTIAL if failures else EXIT_OK


def read_sidecar(path: str | Path) -> dict[str, object]:
    """Load synth metadata: ``atmosphere`` array plus ``t_const`` or ``t_map``."""
    raw = dict(line.split("=", 1) for line in Path(path).read_text().split() if "=" in line)
    out: dict[str, object] = {
        "atmosphere": np.array([float(raw["a_r"]), float(raw["a_g"]), float(raw["a_b"])])
    }
    if "t_const" in raw:
        out["t_const"] = float(raw["t_const"])
    if "t_map" in raw:
        out["t_map"] = np.load(Path(path).parent / raw["t_map"])
    return out


# -- argument parsing -----------------------------------------------------------

def _add_dehaze_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=["dcp", "pfdcp"])
    p.add_argument("--profile", choices=["indoor", "outdoor", "custom"],
                   help="fusion weights: indoor 4:1, outdoor 80:1, custom needs --weights")
    p.add_argument("--weights", type=_parse_weights, metavar="WLOW:WHIGH")
    p.add_argument("--patch", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--top-fraction", dest="top_fraction", type=float)
    p.add_argument("--gf-radius", dest="gf_radius", type=int)
    p.add_argument("--gf-eps", dest="gf_eps", type=float)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", help="key=value file with DehazeParams fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfdcp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dehaze", help="dehaze an image or a directory of images")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--dump-intermediates", action="store_true",
                   help="also write dark channel and transmission maps")
    _add_dehaze_options(p)
    p.set_defaults(func=cmd_dehaze)

    p = sub.add_parser("eval", help="score dehazing against ground truth")
    p.add_argument("hazy", help="directory of hazy images")
    p.add_argument("gt", help="directory of ground-truth images")
    p.add_argument("--csv", help="write per-image metrics here")
    _add_dehaze_options(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="add synthetic haze to clear images")
    p.add_argument("clear")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    a = p.add_mutually_exclusive_group()
    a.add_argument("--airlight", type=_parse_rgb, metavar="R,G,B")
    a.add_argument("--airlight-range", type=_parse_range, default=(0.7, 1.0), metavar="LO:HI")
    t = p.add_mutually_exclusive_group()
    t.add_argument("--t-const", type=float, help="one transmission for every pixel")
    t.add_argument("--t-range", type=_parse_range, default=(0.3, 0.9), metavar="LO:HI",
                   help="random constant transmission per image (default)")
    t.add_argument("--t-map", type=_parse_range, metavar="LO:HI",
                   help="random smooth transmission map per image")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
