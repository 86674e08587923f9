#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the four grid kernels on realistic image sizes and an end-to-end
``evaluate`` on a synthetic corpus, once per available backend.

    python benchmarks/bench_kernels.py [--sizes 522x775 ...] [--repeat 5]
"""

import argparse
import os
import time

import numpy as np


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _scene(h, w, rng):
    """Synthetic gland-like masks and label maps of the requested size."""
    from glandeval import SynthSpec, synth_glands

    scale = min(h, w)
    spec = SynthSpec(
        width=w,
        height=h,
        glands=max(2, (h * w) // 20000),
        radius=(max(8, scale // 30), max(12, scale // 18)),
        ring_thickness=(3, 5),
        seed=int(rng.integers(1 << 30)),
    )
    image, truth = synth_glands(spec)
    noisy = truth.labels.copy()
    # perturb labels a little so the overlap table is non-trivial
    shifted = np.roll(noisy, (3, -2), axis=(0, 1))
    return image, truth.labels, shifted


def bench_backend(name, sizes, repeat):
    os.environ["GLANDEVAL_BACKEND"] = name
    # fresh import under the forced backend
    import importlib

    import glandeval._kernels as kernels

    importlib.reload(kernels)
    assert kernels.BACKEND == name

    rng = np.random.default_rng(7)
    rows = []
    for h, w in sizes:
        image, gt, seg = _scene(h, w, rng)
        mask = gt > 0
        rows.append(
            (
                f"{h}x{w}",
                _time(lambda: kernels.label_components(mask, 8), repeat),
                _time(lambda: kernels.sq_edt(mask), repeat),
                _time(lambda: kernels.overlap_counts(gt, seg), repeat),
                _time(lambda: kernels.inner_boundary(gt), repeat),
            )
        )
    return rows


def bench_evaluate(name, repeat):
    os.environ["GLANDEVAL_BACKEND"] = name
    import importlib

    import glandeval._kernels as kernels

    importlib.reload(kernels)

    from glandeval import LabelMap, SynthSpec, evaluate, perturb, synth_glands

    raw = []
    for k in range(5):
        _, truth = synth_glands(SynthSpec(glands=6, seed=k, width=522, height=775))
        raw.append((truth.labels, perturb(truth, "dilate", magnitude=2).labels))

    def run():
        # fresh maps so per-map caches do not leak across repeats
        evaluate([(LabelMap(g), LabelMap(s)) for g, s in raw])

    return _time(run, repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes",
        nargs="*",
        default=["256x256", "522x775", "1024x1024"],
        help="HxW grid sizes to benchmark",
    )
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [tuple(int(v) for v in s.split("x")) for s in args.sizes]

    from glandeval._kernels import available_backends

    backends = available_backends()
    print(f"backends: {backends}\n")
    header = f"{'backend':8} {'size':>10} {'label':>9} {'sq_edt':>9} {'overlap':>9} {'boundary':>9}"
    print(header)
    print("-" * len(header))
    results = {}
    for name in backends:
        for size, t_label, t_edt, t_overlap, t_bound in bench_backend(
            name, sizes, args.repeat
        ):
            results[(name, size)] = (t_label, t_edt, t_overlap, t_bound)
            print(
                f"{name:8} {size:>10} {t_label * 1e3:8.2f}ms {t_edt * 1e3:8.2f}ms "
                f"{t_overlap * 1e3:8.2f}ms {t_bound * 1e3:8.2f}ms"
            )
    if len(backends) > 1:
        print("\nspeedup (python / native):")
        for size in [f"{h}x{w}" for h, w in sizes]:
            py = results[("python", size)]
            nt = results[("native", size)]
            ratios = " ".join(f"{p / n:6.1f}x" for p, n in zip(py, nt))
            print(f"  {size:>10}: {ratios}")

    print("\nend-to-end evaluate, 5 images 522x775, dilated predictions:")
    for name in backends:
        print(f"  {name:8} {bench_evaluate(name, max(2, args.repeat // 2)) :6.2f}s")


if __name__ == "__main__":
    main()
