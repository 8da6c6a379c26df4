"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The statistical criteria train 3 algorithms x 5 seeds; scale knobs:

  ROYAL_UR_ACCEPT_EPISODES   episodes per training run (default 20000)
  ROYAL_UR_ACCEPT_SEEDS      number of seeds (default 5)
  ROYAL_UR_ACCEPT_GAMES      evaluation games per run (default 1000)
  ROYAL_UR_ACCEPT_JOBS       parallel training processes (default: cpu count)

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion lines.

Known-red criterion: learning-signal (time-to-finish decrease). Under the
specified rewards, trained self-play is capture-heavy and games get longer,
not shorter; see notes in the repository decision log. The test states the
criterion faithfully and reports the measured direction.
"""

from __future__ import annotations

import os
import struct
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor

import pytest
from scipy import stats

from conftest import enumerate_reachable
from oracle import oracle_legal_actions

from royal_ur import (
    LearnerConfig,
    QTable,
    RulesConfig,
    Seat,
    Transition,
    expected_sarsa_update,
    legal_actions,
    make_state,
    mc_update,
    q_learning_update,
)
from royal_ur.cli import main
from royal_ur.storage import TableMeta, load_qtable, save_qtable
from royal_ur.training import TRACKED_STATE_KEY, TrainConfig, evaluate, probe, train

EPISODES = int(os.environ.get("ROYAL_UR_ACCEPT_EPISODES", "20000"))
N_SEEDS = int(os.environ.get("ROYAL_UR_ACCEPT_SEEDS", "5"))
GAMES = int(os.environ.get("ROYAL_UR_ACCEPT_GAMES", "1000"))
JOBS = int(os.environ.get("ROYAL_UR_ACCEPT_JOBS", str(os.cpu_count() or 1)))

ALGORITHMS = ("q_learning", "expected_sarsa", "monte_carlo")
SEEDS = tuple(range(11, 11 + N_SEEDS))
RULES = RulesConfig(pieces_per_player=4, dice_count=2, reroll_on_max=False)

# War-exit dilemma: the mover's piece sits on (b,8) one step from the
# safe lane, with an opponent piece threatening from (b,5).
WAR_EXIT_ACTION = 8


def war_exit_state():
    return make_state(Seat.P1, 1, (3, 3), ((12,), (9,)), (0, 0))


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def run_one(args: tuple[str, int]) -> dict:
    """Train one (algorithm, seed) pair and distill everything the
    criteria need; runs in a worker process."""
    algorithm, seed = args
    learner = LearnerConfig(algorithm=algorithm)
    cfg = TrainConfig(
        episodes=EPISODES,
        rules=RULES,
        learners=(learner, learner),
        seed=seed,
        metrics_stride=1,
    )
    result = train(cfg)
    ttf = [p.time_to_finish for p in result.metrics]
    decile = max(1, len(ttf) // 10)

    eval_result = evaluate(result.tables[0], GAMES, RULES, seed=seed + 10_000)

    probe_result = probe(result.tables[0], war_exit_state(), RULES)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "table.tsv")
        meta = TableMeta(algorithm=algorithm, seed=seed, episodes=EPISODES)
        save_qtable(result.tables[0], meta, path)
        loaded, _ = load_qtable(path)
        roundtrip_ok = (
            loaded.entries == result.tables[0].entries
            and loaded.visits == result.tables[0].visits
        )

    return {
        "algorithm": algorithm,
        "seed": seed,
        "ttf_first_decile": ttf[:decile],
        "ttf_last_decile": ttf[-decile:],
        "tracked_first": result.metrics[0].tracked_value,
        "tracked_last": result.metrics[-1].tracked_value,
        "eval_wins": eval_result.agent_wins,
        "eval_games": eval_result.games,
        "probe_action": probe_result.action,
        "probe_q": probe_result.q_values,
        "table_entries": len(result.tables[0]),
        "roundtrip_ok": roundtrip_ok,
    }


@pytest.fixture(scope="session")
def runs() -> dict[tuple[str, int], dict]:
    jobs = [(algorithm, seed) for algorithm in ALGORITHMS for seed in SEEDS]
    started = time.time()
    out: dict[tuple[str, int], dict] = {}
    if JOBS > 1:
        with ProcessPoolExecutor(max_workers=JOBS) as pool:
            for summary in pool.map(run_one, jobs):
                out[(summary["algorithm"], summary["seed"])] = summary
    else:
        for job in jobs:
            summary = run_one(job)
            out[(summary["algorithm"], summary["seed"])] = summary
    print(f"\ntrained {len(jobs)} runs of {EPISODES} episodes in {time.time() - started:.0f}s")
    return out


class TestRulesOracleEquivalence:
    def test_exhaustive_single_piece_agreement(self):
        config = RulesConfig(1, 2, False)
        started = time.time()
        states = enumerate_reachable(config)
        mismatches = [
            s for s in states if legal_actions(s, config) != oracle_legal_actions(s, config)
        ]
        elapsed = time.time() - started
        ok = not mismatches and elapsed < 10.0
        _criterion(
            "rules-oracle-equivalence",
            ok,
            f"{len(states)} reachable states, {len(mismatches)} disagreements, {elapsed:.1f}s",
        )
        assert not mismatches
        assert elapsed < 10.0


class TestUpdateRuleArithmetic:
    def test_worked_examples_and_eps0_coincidence(self):
        import random

        q = QTable()
        q.set("s2", 1, 5.0)
        cfg = LearnerConfig(alpha=0.1, gamma=0.9)
        v1 = q_learning_update(q, Transition("s1", 3, 10.0, "s2", (1,)), cfg)
        q.set("t", 7, 2.0)
        v2 = q_learning_update(q, Transition("t", 7, 100.0, None), cfg)

        qe = QTable()
        for a, v in ((1, 1.0), (2, 2.0), (3, 3.0)):
            qe.set("n", a, v)
        es_cfg = LearnerConfig(alpha=1.0, gamma=1.0, epsilon=0.1)
        v3 = expected_sarsa_update(qe, Transition("m", 1, 0.0, "n", (1, 2, 3)), es_cfg)

        qm = QTable(track_visits=True)
        mc_update(
            qm,
            [Transition("a", 1, 0.0, "b", (1,)), Transition("b", 1, 100.0, None)],
            LearnerConfig(gamma=0.9, algorithm="monte_carlo"),
        )

        exact = (
            abs(v1 - 1.45) < 1e-12
            and abs(v2 - 11.8) < 1e-12
            and abs(v3 - 2.9) < 1e-12
            and abs(qm.get("a", 1) - 90.0) < 1e-12
            and qm.get("b", 1) == 100.0
        )

        rng = random.Random(5150)
        bitwise = True
        for _ in range(10_000):
            qa, qb = QTable(), QTable()
            states = ["x", "y", "z"]
            for s in states:
                for a in range(3):
                    if rng.random() < 0.7:
                        v = rng.uniform(-40, 130)
                        qa.set(s, a, v)
                        qb.set(s, a, v)
            terminal = rng.random() < 0.25
            t = Transition(
                rng.choice(states),
                rng.randrange(3),
                rng.uniform(-10, 120),
                None if terminal else rng.choice(states),
                () if terminal else tuple(sorted(rng.sample(range(3), rng.randint(1, 3)))),
            )
            ucfg = LearnerConfig(alpha=rng.uniform(0.01, 1.0), gamma=rng.random(), epsilon=0.0)
            va = q_learning_update(qa, t, ucfg)
            vb = expected_sarsa_update(qb, t, ucfg)
            if struct.pack("<d", va) != struct.pack("<d", vb):
                bitwise = False
                break

        _criterion(
            "update-rule-arithmetic",
            exact and bitwise,
            f"worked examples exact={exact}, eps0 coincidence bitwise over 10k={bitwise}",
        )
        assert exact and bitwise


class TestToyMdpConvergence:
    def test_td_learners_match_value_iteration(self):
        from test_agents import TOY_LEGAL, TOY_TRANSITIONS, toy_value_iteration

        oracle = toy_value_iteration(0.9)
        worst = {}
        for name, update in (("q_learning", q_learning_update), ("expected_sarsa", expected_sarsa_update)):
            q = QTable()
            cfg = LearnerConfig(alpha=0.1, gamma=0.9, epsilon=0.0)
            sweeps = 0
            for sweeps in range(1, 10_001):
                for (s, a), (r, nxt) in TOY_TRANSITIONS.items():
                    legal = TOY_LEGAL[nxt] if nxt is not None else ()
                    update(q, Transition(s, a, r, nxt, legal), cfg)
                gap = max(abs(q.get(s, a) - oracle[(s, a)]) for (s, a) in TOY_TRANSITIONS)
                if gap < 1e-3:
                    break
            worst[name] = (sweeps, gap)
        ok = all(sweeps < 10_000 and gap < 1e-3 for sweeps, gap in worst.values())
        _criterion(
            "toy-mdp-convergence",
            ok,
            ", ".join(f"{k}: {v[0]} sweeps, gap {v[1]:.2e}" for k, v in worst.items()),
        )
        assert ok


class TestLearningSignal:
    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_time_to_finish_decreases(self, runs, algorithm):
        """Trained games are expected to get shorter. Known red:
        the shaped rewards make trained self-play capture-heavy, so games
        lengthen; see the decision log for the measured mechanism."""
        first, last = [], []
        for seed in SEEDS:
            summary = runs[(algorithm, seed)]
            first.extend(summary["ttf_first_decile"])
            last.extend(summary["ttf_last_decile"])
        mean_first = sum(first) / len(first)
        mean_last = sum(last) / len(last)
        test = stats.ttest_ind(last, first, equal_var=False, alternative="less")
        ok = mean_last < mean_first and test.pvalue < 0.01
        _criterion(
            f"learning-signal[{algorithm}]",
            ok,
            f"first-decile mean {mean_first:.1f}, last-decile mean {mean_last:.1f}, "
            f"one-sided Welch p={test.pvalue:.3g} over {len(SEEDS)} seeds",
        )
        assert ok, (
            f"{algorithm}: last-decile mean {mean_last:.1f} is not below "
            f"first-decile mean {mean_first:.1f} (p={test.pvalue:.3g})"
        )


class TestEvaluationDominance:
    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_trained_agent_beats_random(self, runs, algorithm):
        details = []
        ok = True
        for seed in SEEDS:
            summary = runs[(algorithm, seed)]
            wins, games = summary["eval_wins"], summary["eval_games"]
            p = stats.binomtest(wins, games, p=0.5, alternative="greater").pvalue
            details.append(f"seed {seed}: {wins}/{games} (p={p:.2g})")
            ok = ok and wins / games > 0.5 and p < 0.01
        _criterion(f"eval-dominance[{algorithm}]", ok, "; ".join(details))
        assert ok

    def test_full_scale_q_learning_band(self, runs):
        """The reference win-rate band [0.50, 0.75] applies at 100k-episode scale."""
        rates = [runs[("q_learning", s)]["eval_wins"] / runs[("q_learning", s)]["eval_games"]
                 for s in SEEDS]
        mean_rate = sum(rates) / len(rates)
        if EPISODES < 100_000:
            _criterion(
                "full-scale-band[q_learning]",
                True,
                f"desk scale ({EPISODES} episodes): mean win rate {mean_rate:.3f} reported, "
                "band asserted only at ROYAL_UR_ACCEPT_EPISODES=100000",
            )
            return
        ok = all(0.50 <= r <= 0.75 for r in rates)
        _criterion(
            "full-scale-band[q_learning]",
            ok,
            f"win rates {', '.join(f'{r:.3f}' for r in rates)} (expected within [0.50, 0.75])",
        )
        assert ok, f"full-scale win rates {rates} not within [0.50, 0.75]"


class TestTrackedStateValue:
    @pytest.mark.parametrize("algorithm", ALGORITHMS)
    def test_tracked_value_zero_then_positive(self, runs, algorithm):
        details = []
        ok = True
        for seed in SEEDS:
            summary = runs[(algorithm, seed)]
            good = summary["tracked_first"] == 0.0 and summary["tracked_last"] > 0.0
            ok = ok and good
            details.append(f"seed {seed}: 0.0 -> {summary['tracked_last']:.2f}")
        _criterion(f"tracked-state-value[{algorithm}]", ok, "; ".join(details))
        assert ok
        assert TRACKED_STATE_KEY == "((3, ((a,3),)), (3, ((c,3),)), 1)"


class TestStrategicMoveProbe:
    def test_war_exit_probe_reported_per_seed(self, runs):
        """Soft criterion: report per-seed greedy choices at the dilemma
        position rather than hard-failing (single-seed play is stochastic)."""
        lines = []
        majorities = {}
        for algorithm in ALGORITHMS:
            hits = 0
            for seed in SEEDS:
                summary = runs[(algorithm, seed)]
                action = summary["probe_action"]
                hits += action == WAR_EXIT_ACTION
                qs = ", ".join(f"{a}:{v:+.2f}" for a, v in sorted(summary["probe_q"].items()))
                lines.append(f"  {algorithm} seed {seed}: greedy={action} ({qs})")
            majorities[algorithm] = hits
        detail = "; ".join(
            f"{algo} {hits}/{len(SEEDS)} seeds pick the war-exit move"
            for algo, hits in majorities.items()
        )
        _criterion("strategic-move-probe", True, detail)
        for line in lines:
            print(line)
        for algorithm in ALGORITHMS:
            for seed in SEEDS:
                summary = runs[(algorithm, seed)]
                assert summary["probe_action"] in summary["probe_q"]
                assert set(summary["probe_q"]) == {8, 21}  # advance (b,8) or enter


class TestReproducibility:
    def test_identical_cli_runs_are_byte_identical(self, tmp_path):
        argv = ["train", "--algo", "q", "--episodes", "300", "--seed", "2024",
                "--stride", "20"]
        assert main(argv + ["--out", str(tmp_path / "a")]) == 0
        assert main(argv + ["--out", str(tmp_path / "b")]) == 0
        same = all(
            (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
            for name in ("qtable_p1.tsv", "qtable_p2.tsv", "metrics.csv")
        )
        _criterion("reproducibility", same, "two identical train commands, three files byte-compared")
        assert same


class TestPersistenceRoundTrip:
    def test_trained_tables_round_trip_lossless(self, runs):
        bad = [key for key, summary in runs.items() if not summary["roundtrip_ok"]]
        sizes = {a: max(runs[(a, s)]["table_entries"] for s in SEEDS) for a in ALGORITHMS}
        _criterion(
            "persistence-round-trip",
            not bad,
            f"{len(runs)} tables round-tripped (largest per algo: {sizes}); failures: {bad or 'none'}",
        )
        assert not bad
