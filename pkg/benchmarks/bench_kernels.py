"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels on synthetic workloads shaped like real ranking
runs (identifier-sized strings, small dense matrices), then an end-to-end
candidate-ranking pass under each backend.
"""

import argparse
import random
import time


def build_string_pairs(rng, count=4000):
    vocab = [
        "get", "weather", "city", "zip", "code", "temperature", "forecast",
        "country", "name", "request", "response", "list", "condition",
    ]
    pairs = []
    for _ in range(count):
        a = rng.choice(vocab) + rng.choice(["", rng.choice(vocab)])
        b = rng.choice(vocab) + rng.choice(["", rng.choice(vocab)])
        pairs.append((a, b))
    return pairs


def build_matrices(rng, count=2000):
    out = []
    for _ in range(count):
        n, m = rng.randint(2, 8), rng.randint(2, 8)
        out.append([[rng.random() for _ in range(m)] for _ in range(n)])
    return out


def time_call(func, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - started)
    return best


def bench_backend(module, pairs, matrices, repeat):
    def run_jw():
        jw = module.jaro_winkler
        for a, b in pairs:
            jw(a, b)

    def run_hd():
        hd = module.hausdorff_reduce
        for matrix in matrices:
            hd(matrix)

    return time_call(run_jw, repeat=repeat), time_call(run_hd, repeat=repeat)


def bench_end_to_end(repeat):
    """Rank the bundled fixtures with each backend via WSMATCH_PURE."""
    import os
    import subprocess
    import sys
    from pathlib import Path

    fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    script = (
        "import time, sys\n"
        "from wsmatch.lexicon import load_lexicon\n"
        "from wsmatch.textsim import SimilarityCalculator\n"
        "from wsmatch.wsdl import parse_wsdl_location\n"
        "from wsmatch.engine import rank_candidates\n"
        f"fixtures = {str(fixtures)!r}\n"
        "lex = load_lexicon(fixtures + '/lexicon.txt')\n"
        "target = parse_wsdl_location(fixtures + '/wsdl/weather-a.wsdl')\n"
        "pool = [parse_wsdl_location(fixtures + '/wsdl/' + n) for n in\n"
        "        ('weather-b.wsdl', 'weather-a-renamed.wsdl', 'unrelated.wsdl',\n"
        "         'relations-a.wsdl', 'relations-b.wsdl')]\n"
        "best = float('inf')\n"
        f"for _ in range({repeat}):\n"
        "    calc = SimilarityCalculator(lex)\n"
        "    t0 = time.perf_counter()\n"
        "    rank_candidates(calc, target, pool)\n"
        "    best = min(best, time.perf_counter() - t0)\n"
        "print(best)\n"
    )
    timings = {}
    for backend, env_value in (("cython", "0"), ("pure", "1")):
        env = dict(os.environ, WSMATCH_PURE=env_value)
        result = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env
        )
        result.check_returncode()
        timings[backend] = float(result.stdout.strip())
    return timings


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    from wsmatch._kernels import _pure

    try:
        from wsmatch._kernels import _speedups
    except ImportError:
        _speedups = None

    rng = random.Random(2024)
    pairs = build_string_pairs(rng)
    matrices = build_matrices(rng)

    rows = []
    pure_jw, pure_hd = bench_backend(_pure, pairs, matrices, args.repeat)
    rows.append(("pure", pure_jw, pure_hd, 1.0, 1.0))
    if _speedups is not None:
        fast_jw, fast_hd = bench_backend(_speedups, pairs, matrices, args.repeat)
        rows.append(
            ("cython", fast_jw, fast_hd, pure_jw / fast_jw, pure_hd / fast_hd)
        )

    print(f"{'backend':<8} {'jaro-winkler':>14} {'hausdorff':>12} "
          f"{'jw speedup':>11} {'hd speedup':>11}")
    for name, jw, hd, jw_x, hd_x in rows:
        print(f"{name:<8} {jw * 1e3:>12.2f}ms {hd * 1e3:>10.2f}ms "
              f"{jw_x:>10.1f}x {hd_x:>10.1f}x")

    if _speedups is not None:
        print("\nend-to-end ranking over the bundled fixtures:")
        timings = bench_end_to_end(args.repeat)
        for backend in ("pure", "cython"):
            print(f"  {backend:<8} {timings[backend] * 1e3:8.1f}ms")
        print(f"  speedup  {timings['pure'] / timings['cython']:8.1f}x")


if __name__ == "__main__":
    main()
