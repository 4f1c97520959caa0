"""Command-line driver for the full pipeline.

Subcommands:
  synth    render a bundled or JSON-described scene to a dataset directory
  depth    estimate depth from a dataset via the cost-volume argmin
  loss     compute the full loss report for a student/teacher depth pair
  eval     score a predicted depth map against ground truth
  dump-cv  build a cost volume and write the raw SWPCV1 dump

Datasets are directories of frame_%04d.ppm, depth_%04d.pfm, pose_%04d.json
(camera-to-world), and intrinsics.json, as written by `synth`. All
structured output is JSON on stdout; dense output is PFM. Exit code is 0
iff the requested outputs were written; malformed inputs produce a typed
message on stderr and exit code 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as sdio
from .augment import Augmentation, AugmentConfig, apply_augmentation, draw_augmentation
from .costvolume import (
    CostVolume,
    DepthPlaneSet,
    argmin_depth,
    build_cost_volume,
    inverse_depth_planes,
    linear_planes,
    upsample_nearest,
    zero_volume,
)
from .errors import SweepDepthError
from .evaluation import crop, depth_metrics, abs_rel_error_map, error_heatmap, median_scale
from .features import EXTRACTOR_KINDS, extract_features
from .geometry import Intrinsics, Pose, bilinear_sample, reproject_grid
from .losses import consistency_mask, total_loss
from .synth import (
    PRESET_NAMES,
    SceneSetup,
    load_scene_setup,
    make_sequence,
    mover_rect,
    preset_scene,
    relative_pose,
)


@dataclass
class Dataset:
    K: Intrinsics
    images: list[np.ndarray]
    depths: list[np.ndarray | None]
    poses: list[Pose]


def load_dataset(root: str | Path) -> Dataset:
    root = Path(root)
    K = sdio.read_intrinsics(root / "intrinsics.json")
    images, depths, poses = [], [], []
    t = 0
    while (root / f"frame_{t:04d}.ppm").exists():
        images.append(sdio.read_ppm(root / f"frame_{t:04d}.ppm"))
        depth_path = root / f"depth_{t:04d}.pfm"
        depths.append(sdio.read_pfm(depth_path) if depth_path.exists() else None)
        poses.append(sdio.read_pose(root / f"pose_{t:04d}.json"))
        t += 1
    if not images:
        raise SweepDepthError(f"no frame_0000.ppm under {root}")
    return Dataset(K=K, images=images, depths=depths, poses=poses)


def _resolve_planes(args) -> DepthPlaneSet:
    explicit = args.d_min is not None or args.d_max is not None
    if explicit == bool(args.adaptive_state):
        raise SweepDepthError(
            "specify either --d-min/--d-max or --adaptive-state, not both or neither"
        )
    spacing = inverse_depth_planes if args.inverse_depth_planes else linear_planes
    if args.adaptive_state:
        obj = json.loads(Path(args.adaptive_state).read_text())
        return spacing(float(obj["d_min"]), float(obj["d_max"]), args.planes)
    if args.d_min is None or args.d_max is None:
        raise SweepDepthError("--d-min and --d-max must be given together")
    return spacing(args.d_min, args.d_max, args.planes)


def _source_indices(args, target: int, count: int) -> list[int]:
    if args.sources is not None:
        idxs = args.sources
    else:
        idxs = [target - 1]
    for i in idxs:
        if not (0 <= i < count) or i == target:
            raise SweepDepthError(f"bad source index {i} for {count}-frame dataset")
    return idxs


def _build_volume(
    data: Dataset, target: int, source_idxs: list[int], planes: DepthPlaneSet, args
) -> tuple[CostVolume, Intrinsics]:
    """Feature extraction + plane sweep, honoring --zero-cv and augmentation."""
    K_f = data.K.scaled(args.feature_scale)
    f_target = extract_features(data.images[target], args.features, args.feature_scale)
    shape = (K_f.height, K_f.width, len(planes))

    if args.zero_cv:
        return zero_volume(*shape), K_f

    source_images = {i: data.images[i] for i in source_idxs}
    if getattr(args, "augment_sample", None) is not None:
        cfg = AugmentConfig(p=args.aug_p, q=args.aug_q, rng_seed=args.seed)
        decision = draw_augmentation(cfg, args.augment_sample)
        result = apply_augmentation(
            decision,
            data.images[target],
            data.images[source_idxs[0]],
            shape,
            cfg,
            args.augment_sample,
        )
        if decision is Augmentation.ZERO_VOLUME:
            return result, K_f
        if decision is Augmentation.STATIC_SUBSTITUTE:
            source_images[source_idxs[0]] = result

    sources = []
    for i in source_idxs:
        fmap = extract_features(source_images[i], args.features, args.feature_scale)
        sources.append((fmap, relative_pose(data.poses[target], data.poses[i])))
    return build_cost_volume(f_target, sources, K_f, planes), K_f


def cmd_synth(args) -> int:
    if args.scene in PRESET_NAMES:
        setup: SceneSetup = preset_scene(args.scene, seed=args.seed)
    elif Path(args.scene).exists():
        setup = load_scene_setup(args.scene)
    else:
        raise SweepDepthError(
            f"scene {args.scene!r} is neither a preset {PRESET_NAMES} nor a file"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    frames = make_sequence(setup.scene, setup.poses, setup.K)
    sdio.write_intrinsics(out / "intrinsics.json", setup.K)
    for frame in frames:
        sdio.write_ppm(out / f"frame_{frame.time:04d}.ppm", frame.image)
        sdio.write_pfm(out / f"depth_{frame.time:04d}.pfm", frame.depth_gt)
        sdio.write_pose(out / f"pose_{frame.time:04d}.json", frame.pose)
    if setup.scene.mover is not None:
        rects = [
            {
                "time": frame.time,
                "rect": list(mover_rect(setup.scene, frame.pose, setup.K, frame.time)),
            }
            for frame in frames
        ]
        (out / "mover.json").write_text(json.dumps({"frames": rects}, indent=2) + "\n")
    print(json.dumps({"out": str(out), "frames": len(frames), "target_index": setup.target_index}))
    return 0


def cmd_depth(args) -> int:
    data = load_dataset(args.data)
    target = args.target
    if not (0 <= target < len(data.images)):
        raise SweepDepthError(f"target {target} out of range")
    source_idxs = _source_indices(args, target, len(data.images))
    planes = _resolve_planes(args)
    cv, K_f = _build_volume(data, target, source_idxs, planes, args)

    depth_f, valid = argmin_depth(cv, planes)
    depth_img = upsample_nearest(
        depth_f, args.feature_scale, data.K.height, data.K.width
    )
    sdio.write_pfm(args.out, depth_img)
    written = {"depth": str(args.out)}

    if args.teacher:
        teacher = sdio.read_pfm(args.teacher)
        mask = consistency_mask(depth_img, teacher)
        mask_path = args.mask_out or str(Path(args.out).with_suffix(".mask.pfm"))
        sdio.write_pfm(mask_path, mask.astype(float))
        written["mask"] = mask_path
        written["mask_fraction"] = float(mask.mean())
    if args.dump_cv:
        sdio.write_cost_volume(args.dump_cv, cv, planes)
        written["cost_volume"] = str(args.dump_cv)
    written["argmin_valid_fraction"] = float(valid.mean())
    print(json.dumps(written))
    return 0


def cmd_loss(args) -> int:
    data = load_dataset(args.data)
    target = args.target
    if not (0 <= target < len(data.images)):
        raise SweepDepthError(f"target {target} out of range")
    if args.sources is None:
        args.sources = [i for i in (target - 1, target + 1) if 0 <= i < len(data.images)]
    loss_sources = _source_indices(args, target, len(data.images))

    student = sdio.read_pfm(args.student)
    teacher = sdio.read_pfm(args.teacher)
    target_img = data.images[target]

    synthesized = []
    for i in loss_sources:
        grid = reproject_grid(student, relative_pose(data.poses[target], data.poses[i]), data.K)
        img, valid = bilinear_sample(data.images[i], grid)
        synthesized.append((img, valid))

    cv_args = argparse.Namespace(**vars(args))
    cv_args.sources = args.cv_sources
    cv_source_idxs = _source_indices(cv_args, target, len(data.images))
    planes = _resolve_planes(args)
    cv, _K_f = _build_volume(data, target, cv_source_idxs, planes, args)
    depth_f, _ = argmin_depth(cv, planes)
    d_cv = upsample_nearest(depth_f, args.feature_scale, data.K.height, data.K.width)

    report = total_loss(
        target_img,
        synthesized,
        student,
        teacher,
        d_cv,
        target_img,
        smoothness_weight=args.smooth_weight,
    )
    payload = json.dumps(report.to_json_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload)
    return 0


def cmd_eval(args) -> int:
    pred = crop(sdio.read_pfm(args.pred), args.crop)
    gt = crop(sdio.read_pfm(args.gt), args.crop)
    if args.median_scale:
        valid = (gt > 0) & (gt < args.cap)
        pred = median_scale(pred, gt, valid)
    report = depth_metrics(pred, gt, cap=args.cap)
    if args.error_map:
        err, _valid = abs_rel_error_map(np.clip(pred, 1e-3, args.cap), gt)
        path = Path(args.error_map)
        if path.suffix.lower() == ".ppm":
            sdio.write_ppm(path, error_heatmap(err))
        else:
            sdio.write_pfm(path, err)
    payload = json.dumps(report.to_json_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload)
    return 0


def cmd_dump_cv(args) -> int:
    data = load_dataset(args.data)
    target = args.target
    source_idxs = _source_indices(args, target, len(data.images))
    planes = _resolve_planes(args)
    cv, _ = _build_volume(data, target, source_idxs, planes, args)
    sdio.write_cost_volume(args.out, cv, planes)
    print(json.dumps({"cost_volume": str(args.out), "shape": list(cv.shape)}))
    return 0


def _add_volume_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", choices=EXTRACTOR_KINDS, default="gradient")
    p.add_argument("--feature-scale", type=int, choices=(1, 2, 4), default=4,
                   help="feature downsample factor (default quarter resolution)")
    p.add_argument("--planes", type=int, default=96, help="number of depth planes")
    p.add_argument("--d-min", type=float, default=None)
    p.add_argument("--d-max", type=float, default=None)
    p.add_argument("--adaptive-state", default=None,
                   help="JSON file with running d_min/d_max estimates")
    p.add_argument("--zero-cv", action="store_true",
                   help="substitute the all-zeros cost volume (no-source path)")
    p.add_argument("--inverse-depth-planes", action="store_true",
                   help="experimental: space planes uniformly in 1/depth")
    p.add_argument("--aug-p", type=float, default=0.25)
    p.add_argument("--aug-q", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--augment-sample", type=int, default=None,
                   help="apply the seeded augmentation draw for this sample index")
    p.add_argument("--target", type=int, default=1)
    p.add_argument("--sources", type=int, nargs="+", default=None,
                   help="source frame indices (default: the preceding frame)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sweepdepth", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic dataset")
    p.add_argument("--scene", required=True,
                   help=f"preset name {PRESET_NAMES} or scene JSON path")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("depth", help="cost-volume argmin depth")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output depth PFM")
    p.add_argument("--teacher", default=None, help="teacher depth PFM; writes the consistency mask")
    p.add_argument("--mask-out", default=None)
    p.add_argument("--dump-cv", default=None, help="also write the raw cost volume here")
    _add_volume_options(p)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("loss", help="full loss report")
    p.add_argument("--data", required=True)
    p.add_argument("--student", required=True, help="student depth PFM")
    p.add_argument("--teacher", required=True, help="teacher depth PFM")
    p.add_argument("--cv-sources", type=int, nargs="+", default=None,
                   help="source indices for the cost volume (default: preceding frame)")
    p.add_argument("--smooth-weight", type=float, default=1e-3)
    p.add_argument("--out", default=None)
    _add_volume_options(p)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("eval", help="depth metrics")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--cap", type=float, default=80.0)
    p.add_argument("--crop", choices=("none", "cityscapes_A", "cityscapes_B"), default="none")
    p.add_argument("--median-scale", action="store_true")
    p.add_argument("--error-map", default=None,
                   help="write the abs-rel error map (.pfm raw or .ppm heatmap)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dump-cv", help="build and dump a raw cost volume")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _add_volume_options(p)
    p.set_defaults(func=cmd_dump_cv)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SweepDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
