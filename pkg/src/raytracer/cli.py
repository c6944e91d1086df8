"""Command line interface: offline rendering, FPS benchmarking, serving.

    raytracer render --scene scene.json --width 1280 --height 720 \
        --samples 200 --bounces 3 --out frame.ppm
    raytracer bench --resolution 720p --samples 1 --bounces 1
    raytracer serve --port 8090 --scene scene.json
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import DEFAULT_MEASURED_FRAMES, DEFAULT_WARMUP_FRAMES, RESOLUTIONS, run_benchmark
from .camera import Camera
from .renderer import render_frame
from .scene import Framebuffer, RenderParams
from .sceneio import (
    BENCHMARK_DYNAMIC_SPHERES,
    benchmark_camera,
    build_benchmark_scene,
    load_scene,
    write_ppm,
)


def _add_camera_args(p):
    p.add_argument("--cam-pos", type=float, nargs=3, metavar=("X", "Y", "Z"))
    p.add_argument("--yaw", type=float, default=None, help="camera yaw in radians")
    p.add_argument("--pitch", type=float, default=None, help="camera pitch in radians")
    p.add_argument("--fov", type=float, default=None, help="field of view in degrees")


def _resolve_scene(args):
    """(scene, dynamic sphere indices, default camera) from --scene or built-in."""
    if args.scene is not None:
        scene, dynamic = load_scene(args.scene)
        cam = benchmark_camera()
    else:
        scene, dynamic = build_benchmark_scene(), list(BENCHMARK_DYNAMIC_SPHERES)
        cam = benchmark_camera()
    overrides = {}
    if getattr(args, "cam_pos", None) is not None:
        overrides["position"] = tuple(args.cam_pos)
    for key in ("yaw", "pitch", "fov"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if overrides:
        cam = Camera(
            position=overrides.get("position", cam.position),
            yaw=overrides.get("yaw", cam.yaw),
            pitch=overrides.get("pitch", cam.pitch),
            fov=overrides.get("fov", cam.fov),
        )
    return scene, dynamic, cam


def cmd_render(args) -> int:
    scene, _, cam = _resolve_scene(args)
    params = RenderParams(args.samples, args.bounces, args.width, args.height)
    fb = Framebuffer.create(args.width, args.height)
    render_frame(scene, cam, params, fb, workers=args.workers)
    with open(args.out, "wb") as sink:
        write_ppm(fb, sink)
    print(f"wrote {args.width}x{args.height} frame to {args.out}")
    return 0


def cmd_bench(args) -> int:
    scene, _, cam = _resolve_scene(args)
    width, height = RESOLUTIONS[args.resolution]
    params = RenderParams(args.samples, args.bounces, width, height)
    report = run_benchmark(
        scene,
        cam,
        params,
        warmup_frames=args.warmup,
        measured_frames=args.frames,
        workers=args.workers,
    )
    print(report.summary())
    return 0


def cmd_serve(args) -> int:
    from .server import FrameLoop, serve

    scene, dynamic, cam = _resolve_scene(args)
    params = RenderParams(args.samples, args.bounces, args.width, args.height)
    loop = FrameLoop(scene, cam, params, dynamic=dynamic, workers=args.workers)
    static_dir = args.static
    if static_dir is None and os.path.isdir("frontend"):
        static_dir = "frontend"
    print(f"serving on http://{args.host}:{args.port} (stream at /stream)")
    serve(loop, port=args.port, host=args.host, static_dir=static_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="raytracer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one frame to a PPM file")
    p.add_argument("--scene", help="scene JSON file (default: built-in benchmark scene)")
    p.add_argument("--width", type=int, default=1280)
    p.add_argument("--height", type=int, default=720)
    p.add_argument("--samples", type=int, default=200, help="soft-shadow samples per hit")
    p.add_argument("--bounces", type=int, default=3, help="reflection bounce limit")
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--workers", type=int, default=None)
    _add_camera_args(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="measure frames per second")
    p.add_argument("--scene", help="scene JSON file (default: built-in benchmark scene)")
    p.add_argument("--resolution", choices=sorted(RESOLUTIONS), default="720p")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--bounces", type=int, default=1)
    p.add_argument("--warmup", type=int, default=DEFAULT_WARMUP_FRAMES)
    p.add_argument("--frames", type=int, default=DEFAULT_MEASURED_FRAMES)
    p.add_argument("--workers", type=int, default=None)
    _add_camera_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="stream frames to browser viewers")
    p.add_argument("--scene", help="scene JSON file (default: built-in benchmark scene)")
    p.add_argument("--port", type=int, default=8090)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--width", type=int, default=1280)
    p.add_argument("--height", type=int, default=720)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--bounces", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--static", help="static asset directory for the viewer")
    _add_camera_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
