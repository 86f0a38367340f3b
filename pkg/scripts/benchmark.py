#!/usr/bin/env python3
"""
Simulation benchmark for the causalgroups toolkit
Measures subgroup recovery, dependence decisions, early warning and
stable-feature selection over many seeds
"""
import argparse
import json
import statistics
import sys
import time
from pathlib import Path
from typing import Dict, List

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from causalgroups.causal_kernel import kernel_gap, kernel_matrix  # noqa: E402
from causalgroups.causal_mapping import Dependence, dependence_decision  # noqa: E402
from causalgroups.clustering import baseline_kernel, cluster_pipeline, kernel_kmeans, raw_kmeans  # noqa: E402
from causalgroups.early_warning import (  # noqa: E402
    NodeSeriesSet,
    WarnConfig,
    extract_warnings,
    lagged_kappa,
    tc_series,
    yearly_causal,
)
from causalgroups.eval_metrics import adjusted_rand_index, v_measure  # noqa: E402
from causalgroups.stability import rank_features, sta_error_eval  # noqa: E402
from causalgroups.synth import GenConfig, benchmark_groups, regime_switch_series, two_dag_benchmark  # noqa: E402

SCENARIOS = {
    "corr_mu_uniform": dict(corr_nonzero=True, mu_mode="uniform"),
    "corr_mu_zero": dict(corr_nonzero=True, mu_mode="zero"),
    "nocorr_mu_uniform": dict(corr_nonzero=False, mu_mode="uniform"),
    "nocorr_mu_zero": dict(corr_nonzero=False, mu_mode="zero"),
    "nonlinear": dict(corr_nonzero=True, mu_mode="uniform", nonlinear=True),
}


class BenchmarkRunner:
    """Run the simulation suites and collect their summaries"""

    def __init__(self, num_seeds: int = 10, suites: List[str] = None, scenario_n: int = 100):
        self.num_seeds = num_seeds
        self.suites = suites or list(self.SUITES)
        self.scenario_n = scenario_n
        self.results: Dict[str, dict] = {}

    def run(self) -> bool:
        """Run all selected suites"""
        print("=" * 70)
        print("Causal Kernel Clustering Benchmark")
        print("=" * 70)
        print(f"\nSeeds per suite: {self.num_seeds}")
        print(f"Suites: {', '.join(self.suites)}")
        print()

        for name in self.suites:
            print(f"Running {name}...")
            start = time.time()
            result = getattr(self, self.SUITES[name])()
            result["runtime_s"] = time.time() - start
            self.results[name] = result
            print(f"  finished in {result['runtime_s']:.1f}s")

        self.print_results()
        return all(result.get("passed", True) for result in self.results.values())

    def benchmark_two_dag(self) -> dict:
        """Chain DAG vs empty DAG, n = 50 each, m = 5"""
        causal, raw, poly, rbf, gaps, permutation = [], [], [], [], [], []
        for seed in range(self.num_seeds):
            config = GenConfig(n=50, m=5, weight_low=1.0, weight_high=2.0, seed=seed)
            S, truth = two_dag_benchmark(config)

            assignment = cluster_pipeline(S, 2, nu=0.05, seed=seed)
            causal.append(adjusted_rand_index(truth, assignment.labels))
            raw.append(adjusted_rand_index(truth, raw_kmeans(S, 2, seed=seed)))
            poly.append(adjusted_rand_index(truth, kernel_kmeans(baseline_kernel(S, "poly"), 2, seed=seed).labels))
            rbf.append(adjusted_rand_index(truth, kernel_kmeans(baseline_kernel(S, "rbf"), 2, seed=seed).labels))

            gap = kernel_gap(S[truth == 0], S[truth == 1], 0.05)
            gaps.append(gap["cross"] < min(gap["within_first"], gap["within_second"]))

            order = np.random.default_rng(seed).permutation(S.shape[0])
            permuted = cluster_pipeline(S[order], 2, nu=0.05, seed=seed)
            permutation.append(
                adjusted_rand_index(assignment.labels[order], permuted.labels) == 1.0
                and abs(permuted.inertia - assignment.inertia) <= 1e-8
            )

        median_causal = statistics.median(causal)
        median_raw = statistics.median(raw)
        return {
            "ari_causal": causal,
            "ari_raw": raw,
            "ari_poly": poly,
            "ari_rbf": rbf,
            "median_ari_causal": median_causal,
            "median_ari_raw": median_raw,
            "kernel_gap_rate": float(np.mean(gaps)),
            "permutation_stable_rate": float(np.mean(permutation)),
            "passed": median_causal >= 0.5 and median_causal > median_raw and np.mean(gaps) >= 0.9,
        }

    def benchmark_scenarios(self) -> dict:
        """Six random DAGs, m = 10, per data-generating scenario"""
        table = {}
        for scenario, overrides in SCENARIOS.items():
            rows = {"causal": [], "raw": [], "poly": [], "rbf": []}
            for seed in range(self.num_seeds):
                config = GenConfig(n=self.scenario_n, m=10, seed=seed, **overrides)
                S, truth = benchmark_groups(6, config)
                predictions = {
                    "causal": kernel_kmeans(kernel_matrix(S, 0.05), 6, seed=seed).labels,
                    "raw": raw_kmeans(S, 6, seed=seed),
                    "poly": kernel_kmeans(baseline_kernel(S, "poly"), 6, seed=seed).labels,
                    "rbf": kernel_kmeans(baseline_kernel(S, "rbf"), 6, seed=seed).labels,
                }
                for method, labels in predictions.items():
                    rows[method].append((v_measure(truth, labels), adjusted_rand_index(truth, labels)))
            table[scenario] = {
                method: {
                    "v_measure": float(np.mean([v for v, _ in values])),
                    "ari": float(np.mean([a for _, a in values])),
                }
                for method, values in rows.items()
            }
            print(f"  {scenario}: " + ", ".join(f"{m} ARI {r['ari']:.3f}" for m, r in table[scenario].items()))
        return {"scenarios": table}

    def benchmark_dependence(self) -> dict:
        """Decision rates for a coupled and an independent pair, n = 100"""
        dependent, independent = 0, 0
        trials = max(self.num_seeds, 100)
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=100)
            coupled = np.column_stack([x, x + 0.1 * rng.normal(size=100)])
            unrelated = rng.normal(size=(100, 2))
            dependent += dependence_decision(coupled, 0, 1, 0.05) == Dependence.DEPENDENT
            independent += dependence_decision(unrelated, 0, 1, 0.05) == Dependence.INDEPENDENT
        return {
            "trials": trials,
            "dependent_rate": dependent / trials,
            "independent_rate": independent / trials,
            "passed": dependent / trials >= 0.9,
        }

    def benchmark_lagged_coupling(self) -> dict:
        """y(t) = x(t - lag) + small noise: kappa at the true lag vs at zero lag"""
        config = WarnConfig(window_w=40, embed_dim=4, max_lag=20, stride=10)
        lag = 10
        wins = 0
        for seed in range(self.num_seeds):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=200)
            y = np.concatenate([np.zeros(lag), x[:-lag]]) + 0.05 * rng.normal(size=200)
            at_lag, _ = lagged_kappa(x, y, 150, lag, config)
            at_zero, _ = lagged_kappa(x, y, 150, 0, config)
            wins += at_lag > at_zero
        return {"win_rate": wins / self.num_seeds, "passed": wins / self.num_seeds >= 0.8}

    def benchmark_early_warning(self) -> dict:
        """Regime switch at year 5 of 10 with the default window configuration"""
        config = WarnConfig()
        hits, warned_years = 0, []
        for seed in range(self.num_seeds):
            series = regime_switch_series(seed=seed)
            west = NodeSeriesSet("west", list(range(series.west.shape[0])), series.west, series.years)
            east = NodeSeriesSet("east", list(range(series.east.shape[0])), series.east, series.years)
            tc = tc_series(west, east, config)
            warned = extract_warnings(yearly_causal(tc["tc"], tc["year"]), config.tau)
            warned_years.append(sorted(int(y) for y in warned))
            hits += bool(warned & {series.switch_year, series.switch_year + 1})
            print(f"  seed {seed}: warned {warned_years[-1]}")
        return {"warned_years": warned_years, "hit_rate": hits / self.num_seeds, "passed": hits / self.num_seeds >= 0.8}

    def benchmark_stability(self) -> dict:
        """Three invariant and three subgroup-specific coefficients, K = 4, n = 200 per subgroup"""
        separated, improved = 0, 0
        for seed in range(self.num_seeds):
            rng = np.random.default_rng(seed)
            labels = np.repeat(np.arange(4), 200)
            S = rng.normal(size=(800, 6))
            varying = rng.normal(scale=2.0, size=(4, 3))
            y = S[:, :3].sum(axis=1) + np.einsum("ij,ij->i", S[:, 3:], varying[labels]) + 0.5 * rng.normal(size=800)

            ranking = rank_features(S, y, labels)
            separated += set(ranking.top(3).tolist()) == {0, 1, 2}
            top = sta_error_eval(S, y, labels, top_k=3)["sta_error"]
            everything = sta_error_eval(S, y, labels, top_k=6)["sta_error"]
            improved += top < everything
        return {
            "separation_rate": separated / self.num_seeds,
            "sta_error_improvement_rate": improved / self.num_seeds,
            "passed": separated / self.num_seeds >= 0.9 and improved / self.num_seeds >= 0.8,
        }

    SUITES = {
        "two_dag": "benchmark_two_dag",
        "scenarios": "benchmark_scenarios",
        "dependence": "benchmark_dependence",
        "lagged_coupling": "benchmark_lagged_coupling",
        "early_warning": "benchmark_early_warning",
        "stability": "benchmark_stability",
    }

    def print_results(self):
        """Print benchmark results"""
        print("\n" + "=" * 70)
        print("BENCHMARK RESULTS")
        print("=" * 70)

        for name, result in self.results.items():
            mark = "✓" if result.get("passed", True) else "✗"
            print(f"\n{mark} {name} ({result['runtime_s']:.1f}s)")
            for key, value in result.items():
                if isinstance(value, float) and key != "runtime_s":
                    print(f"  {key}: {value:.4f}")

        self.save_results(self.results)
        print("\n" + "=" * 70)

    def save_results(self, results: dict):
        """Save results to JSON file"""
        output_dir = Path("benchmark_results")
        output_dir.mkdir(exist_ok=True)

        timestamp = time.strftime("%Y%m%d_%H%M%S")
        output_file = output_dir / f"benchmark_{timestamp}.json"

        with open(output_file, 'w') as f:
            json.dump(results, f, indent=2, default=float)

        print(f"\nResults saved to: {output_file}")


def main():
    parser = argparse.ArgumentParser(description="Benchmark the causalgroups toolkit")
    parser.add_argument(
        "--num-seeds",
        type=int,
        default=10,
        help="Seeds per suite"
    )
    parser.add_argument(
        "--suite",
        action="append",
        choices=list(BenchmarkRunner.SUITES),
        help="Suite to run (repeatable; default all)"
    )
    parser.add_argument(
        "--scenario-n",
        type=int,
        default=100,
        help="Samples per group in the scenario grid"
    )

    args = parser.parse_args()

    benchmark = BenchmarkRunner(args.num_seeds, args.suite, args.scenario_n)
    if not benchmark.run():
        sys.exit(1)


if __name__ == "__main__":
    main()
