"""
Experiment driver: configuration, the parallel Monte Carlo estimator, report
records and their JSON/CSV serialization, and the command implementations
behind main.py.
"""
import io
import csv
import json
import math
import time
import logging
from collections import Counter
from dataclasses import dataclass, field, asdict, fields
from fractions import Fraction
from multiprocessing import Pool
from typing import Optional, Union

import numpy as np
from scipy import stats

import diagram_core
import chord_statistics
import limitlab
import sizebias

logger = logging.getLogger("steinlab.harness")

SCHEMA_VERSION = "1.0"
CONFIDENCE = 1 - 1e-4
COMMANDS = ("sample", "stats", "exact-crossings", "exact-simple", "scfree",
            "sb-verify", "stein-bound", "distance", "report")
MC_STATISTICS = ("crossings", "nestings", "simple_chords", "components", "length_j")
DISTANCE_KINDS = ("tv-poisson", "tv-poisson-one", "kolmogorov", "tv-length")
FORMATS = ("json", "csv")
LENGTH_EXACT_LIMIT = 8
RECORD_FIELDS = ("schema_version", "command", "n", "seed", "samples", "statistic",
                 "estimate", "exact", "ci_low", "ci_high", "bound", "elapsed_ms")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class UsageError(ValueError):
    """Bad command-line flag or configuration value"""
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class VerificationFailure(RuntimeError):
    """A machine-checked claim did not hold"""
    def __init__(self, claim, value):
        super().__init__(f"{claim} violated: {value}")
        self.claim = claim
        self.value = value


@dataclass
class ExperimentConfig:
    command: str
    n: int = 3
    samples: int = 0
    seed: int = 20240101
    workers: int = 1
    format: str = "json"
    out: Optional[str] = None
    statistic: str = "crossings"
    kind: Optional[str] = None
    mode: str = "theoretical"
    j: int = 0
    pairs: Optional[str] = None
    chunk_size: int = 1024
    exact_limit: int = 5
    inner_quadruples: int = 64
    bootstrap_resamples: int = 200
    poisson_tail: float = limitlab.POISSON_TAIL
    corrupt_pmf: bool = False

    MONTE_CARLO = ("sample",)

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError("command", f"unknown command {self.command!r}")
        if self.n < 1:
            raise UsageError("--n", f"must be at least 1, got {self.n}")
        if self.samples < 0:
            raise UsageError("--samples", f"must be non-negative, got {self.samples}")
        if self.command in self.MONTE_CARLO and self.samples < 1:
            raise UsageError("--samples", "must be positive for Monte Carlo commands")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed", f"must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise UsageError("--workers", f"must be at least 1, got {self.workers}")
        if self.format not in FORMATS:
            raise UsageError("--format", f"must be one of {FORMATS}, got {self.format!r}")
        if self.chunk_size < 1:
            raise UsageError("chunk_size", f"must be positive, got {self.chunk_size}")
        if self.statistic not in MC_STATISTICS:
            raise UsageError("--statistic", f"must be one of {MC_STATISTICS}")
        if self.command == "sb-verify" and self.statistic not in ("crossings", "simple_chords"):
            raise UsageError("--statistic", "sb-verify supports crossings and simple_chords")
        if self.command == "distance" and self.kind not in DISTANCE_KINDS:
            raise UsageError("--kind", f"must be one of {DISTANCE_KINDS}, got {self.kind!r}")
        if self.mode not in ("theoretical", "empirical"):
            raise UsageError("--mode", f"must be theoretical or empirical, got {self.mode!r}")
        if self.command in ("sb-verify", "stein-bound") and self.n < 2 and self.statistic == "crossings":
            raise UsageError("--n", "the crossing coupling needs n >= 2")
        uses_length = self.statistic == "length_j" or self.kind == "tv-length"
        if self.j < 0 or uses_length and not (self.j <= self.n - 2 or (self.j == 0 and self.n == 1)):
            raise UsageError("--j", f"must satisfy 0 <= j <= n - 2, got j={self.j}, n={self.n}")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def from_settings(cls, command, settings, **overrides):
        """Config for a command from load_config() settings plus explicit overrides"""
        base = {
            "seed": settings.get("seed"),
            "samples": settings.get("samples"),
            "workers": settings.get("workers"),
            "format": settings.get("format"),
            "chunk_size": settings.get("chunk_size"),
            "exact_limit": settings.get("exact_limit"),
            "inner_quadruples": settings.get("inner_quadruples"),
            "bootstrap_resamples": settings.get("bootstrap_resamples"),
            "poisson_tail": settings.get("poisson_tail"),
        }
        base = {k: v for k, v in base.items() if v is not None}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict({"command": command, **base})


@dataclass
class ReportRecord:
    command: str
    n: int
    seed: int
    samples: int
    statistic: str
    estimate: Union[float, str]
    exact: bool
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    bound: Optional[float] = None
    elapsed_ms: int = 0
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        if self.exact:
            assert self.ci_low is None and self.ci_high is None, "exact records carry no CI"
        elif self.ci_low is not None and self.ci_high is not None:
            assert self.ci_low <= self.estimate <= self.ci_high, "estimate outside its CI"

    def to_dict(self):
        return {name: getattr(self, name) for name in RECORD_FIELDS}

    @classmethod
    def from_dict(cls, data):
        return cls(**{name: data[name] for name in RECORD_FIELDS})


def rational(value):
    """Exact rationals serialize as p/q"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _float_text(value):
    return format(value, ".17g")


def serialize_records(records, fmt="json"):
    if fmt == "json":
        # repr of a float is the shortest text that parses back to it
        return "".join(json.dumps(record.to_dict()) + "\n" for record in records)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for record in records:
            row = []
            for key in RECORD_FIELDS:
                value = getattr(record, key)
                if value is None:
                    row.append("")
                elif isinstance(value, bool):
                    row.append("true" if value else "false")
                elif isinstance(value, float):
                    row.append(_float_text(value))
                else:
                    row.append(str(value))
            writer.writerow(row)
        return buffer.getvalue()
    raise UsageError("--format", f"must be one of {FORMATS}, got {fmt!r}")


def _optional_float(text):
    return None if text == "" else float(text)


def parse_records(text, fmt="json"):
    if fmt == "json":
        return [ReportRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
    if fmt == "csv":
        records = []
        for row in csv.DictReader(io.StringIO(text)):
            exact = row["exact"] == "true"
            records.append(ReportRecord(
                schema_version=row["schema_version"],
                command=row["command"],
                n=int(row["n"]),
                seed=int(row["seed"]),
                samples=int(row["samples"]),
                statistic=row["statistic"],
                estimate=row["estimate"] if exact else float(row["estimate"]),
                exact=exact,
                ci_low=_optional_float(row["ci_low"]),
                ci_high=_optional_float(row["ci_high"]),
                bound=_optional_float(row["bound"]),
                elapsed_ms=int(row["elapsed_ms"]),
            ))
        return records
    raise UsageError("--format", f"must be one of {FORMATS}, got {fmt!r}")


# Monte Carlo


def _statistic_value(statistic, d, j):
    if statistic == "crossings":
        return chord_statistics.count_crossings_fast(d)
    if statistic == "nestings":
        return chord_statistics.count_nestings(d)
    if statistic == "simple_chords":
        return chord_statistics.count_simple_chords(d)
    if statistic == "components":
        return chord_statistics.count_components(d)
    return chord_statistics.count_length_j(d, j)


def _run_chunk(task):
    """One chunk of samples; chunk c always draws from stream c of the seed"""
    statistic, n, seed, chunk, count, j = task
    rng = diagram_core.Rng(seed, chunk)
    values = [_statistic_value(statistic, diagram_core.sample_uniform(n, rng), j)
              for _ in range(count)]
    logger.debug(f"chunk {chunk}: {count} samples of {statistic} at n={n}")
    return values


def draw_statistic(statistic, n, samples, seed, workers=1, chunk_size=1024, j=0):
    """
    Values of a statistic on `samples` uniform diagrams, in sample order.
    Samples are cut into fixed-size chunks with one stream each, so the result
    does not depend on the worker count or on completion order.
    """
    tasks = []
    for chunk, start in enumerate(range(0, samples, chunk_size)):
        tasks.append((statistic, n, seed, chunk, min(chunk_size, samples - start), j))
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            parts = pool.map(_run_chunk, tasks)
    else:
        parts = [_run_chunk(task) for task in tasks]
    return np.array([v for part in parts for v in part], dtype=np.int64)


def mc_estimate(statistic, n, samples, seed, workers=1, kind="mean", chunk_size=1024, j=0,
                command="stats"):
    """
    Monte Carlo estimate with a confidence interval at level 1 - 1e-4.
    kind="mean": sample mean with a normal-approximation interval.
    kind="dk": Kolmogorov distance of the standardized crossing number to N(0, 1)
    with a DKW interval.
    """
    if samples < 1:
        raise UsageError("--samples", "must be positive for Monte Carlo estimates")
    started = time.perf_counter()
    values = draw_statistic(statistic, n, samples, seed, workers, chunk_size, j)
    alpha = 1 - CONFIDENCE

    if kind == "mean":
        estimate = float(values.mean())
        spread = float(values.std(ddof=1)) if samples > 1 else 0.0
        half = float(stats.norm.ppf(1 - alpha / 2)) * spread / math.sqrt(samples)
        low, high = estimate - half, estimate + half
        name = f"{statistic}.mean"
    elif kind == "dk":
        if statistic != "crossings" or n < 2:
            raise UsageError("--kind", "the Kolmogorov estimate is defined for crossings with n >= 2")
        mu, var = chord_statistics.crossing_mean_variance(n)
        standardized = (values - float(mu)) / math.sqrt(var)
        estimate = limitlab.empirical_kolmogorov(standardized)
        radius = limitlab.dkw_radius(samples, alpha)
        low, high = max(0.0, estimate - radius), min(1.0, estimate + radius)
        name = "crossings.dk"
    else:
        raise UsageError("--kind", f"must be mean or dk, got {kind!r}")

    elapsed = int((time.perf_counter() - started) * 1000)
    logger.info(f"{name} at n={n}: {estimate:.6g} [{low:.6g}, {high:.6g}] from {samples} samples")
    return ReportRecord(command, n, seed, samples, name, estimate, False,
                        ci_low=low, ci_high=high, elapsed_ms=elapsed)


# Commands


@dataclass
class Recorder:
    """Collects records for one command, stamping the shared fields"""
    config: ExperimentConfig
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)

    def add(self, statistic, estimate, exact=True, bound=None, samples=None, ci=(None, None)):
        if isinstance(estimate, (Fraction, int)) and not isinstance(estimate, bool) and exact:
            estimate = rational(estimate)
        elapsed = int((time.perf_counter() - self.started) * 1000)
        record = ReportRecord(
            self.config.command, self.config.n, self.config.seed,
            self.config.samples if samples is None else samples,
            statistic, estimate, exact, ci_low=ci[0], ci_high=ci[1],
            bound=None if bound is None else float(bound), elapsed_ms=elapsed)
        self.records.append(record)
        return record

    def check(self, holds, claim, value):
        if not holds:
            self.failures.append(VerificationFailure(claim, value))
        return holds


def _parse_pairs(text):
    pairs = []
    for token in text.replace(";", " ").split():
        left, _, right = token.partition(",")
        if not right:
            left, _, right = token.partition("-")
        try:
            pairs.append((int(left), int(right)))
        except ValueError:
            raise UsageError("--pairs", f"cannot read pair {token!r}")
    return pairs


def _chords_text(d):
    return " ".join(f"{i}-{j}" for i, j in d.chords())


def cmd_sample(config, rec):
    rng = diagram_core.Rng(config.seed, 0)
    for index in range(config.samples):
        d = diagram_core.sample_uniform(config.n, rng)
        rec.add(f"diagram[{index}]", _chords_text(d))


def cmd_stats(config, rec):
    if config.pairs is None and config.samples > 0:
        rec.records.append(mc_estimate(
            config.statistic, config.n, config.samples, config.seed, config.workers,
            kind=config.kind or "mean", chunk_size=config.chunk_size, j=config.j))
        return
    if config.pairs is not None:
        try:
            d = diagram_core.from_pairs(_parse_pairs(config.pairs))
        except diagram_core.ChordDiagramError as e:
            raise UsageError("--pairs", str(e))
        rec.config.n = d.n
    else:
        d = diagram_core.sample_uniform(config.n, diagram_core.Rng(config.seed, 0))
    summary = chord_statistics.diagram_stats(d).check()
    rec.add("chords", _chords_text(d))
    rec.add("crossings", summary.crossings)
    rec.add("nestings", summary.nestings)
    rec.add("simple_chords", summary.simple_chords)
    rec.add("components", summary.components)
    for j, count in sorted(summary.length_counts.items()):
        rec.add(f"length[{j}]", count)


def cmd_exact_crossings(config, rec):
    n = config.n
    pmf = limitlab.crossing_pmf_exact(n)
    for k, w in pmf.items():
        rec.add(f"crossings.pmf[{k}]", w)
    mu, var = chord_statistics.crossing_mean_variance(n)
    rec.add("crossings.mean", pmf.mean(), bound=mu)
    rec.add("crossings.variance", pmf.variance(), bound=var)
    rec.check(pmf.mean() == mu and pmf.variance() == var,
              "crossing moments n(n-1)/6 and n(n-1)(n+3)/45", f"{pmf.mean()}, {pmf.variance()}")
    noncrossing = Fraction(diagram_core.catalan(n), diagram_core.num_diagrams(n))
    rec.add("crossings.noncrossing_catalan", noncrossing)
    rec.check(pmf[0] == noncrossing, "non-crossing diagrams counted by Catalan(n)", str(pmf[0]))


def cmd_exact_simple(config, rec):
    n = config.n
    pmf = limitlab.simple_chord_pmf_exact(n)
    for k, w in pmf.items():
        rec.add(f"simple_chords.pmf[{k}]", w)
    rec.add("simple_chords.mean", pmf.mean())
    rec.add("simple_chords.variance", pmf.variance())
    rec.check(pmf.mean() == Fraction(2 * n, 2 * n - 1),
              "simple-chord mean 2n/(2n-1)", str(pmf.mean()))


def cmd_scfree(config, rec):
    n = config.n
    count = limitlab.simple_chord_free_count(n)
    ratio = Fraction(count, diagram_core.num_diagrams(n))
    lower, upper = limitlab.scfree_bounds(n)
    rec.add("scfree.count", count)
    rec.add("scfree.fraction", ratio)
    rec.add("scfree.lower_factor", lower, exact=False)
    rec.add("scfree.upper_factor", upper, exact=False)
    rec.add("scfree.fraction_times_e", float(ratio) * math.e, exact=False, bound=1.0)
    rec.check(lower <= float(ratio) <= upper,
              "simple-chord-free count bounds (exp(-1/(2n-1)) -/+ 10/n)(2n-1)!!/e",
              f"s({n})/(2n-1)!! = {float(ratio):.17g} outside [{lower:.6g}, {upper:.6g}]")


def cmd_sb_verify(config, rec):
    report = sizebias.verify_size_bias_exact(config.n, config.statistic)
    for x, coupled, target, ok in report.rows:
        rec.add(f"{config.statistic}.sizebias[{x}]", coupled, bound=target)
    rec.add(f"{config.statistic}.match", "true" if report.match else "false")
    rec.check(report.match, f"size-bias coupling for {config.statistic} at n={config.n}",
              report.error or "coupled law differs from the size-bias law")


def _budget(config, seed_offset=0):
    return limitlab.SamplingBudget(
        diagrams=max(config.samples, 2), quadruples=config.inner_quadruples,
        bootstrap=config.bootstrap_resamples, seed=config.seed, stream=seed_offset)


def cmd_stein_bound(config, rec):
    n = config.n
    method = "exact" if n <= config.exact_limit else "monte_carlo"
    if config.mode == "empirical" and method == "monte_carlo":
        logger.warning(f"n={n} exceeds exact_limit={config.exact_limit}; "
                       f"variance term estimated by Monte Carlo")
    report = limitlab.stein_normal_bound(n, config.mode, _budget(config), method=method)
    rec.add("stein.term1", report.term1, exact=False)
    rec.add("stein.term2", report.term2, exact=False)
    theoretical_cap = limitlab.STEIN_NORMAL_CONSTANT / math.sqrt(n)
    rec.add("stein.total", report.total, exact=False,
            bound=theoretical_cap if config.mode == "theoretical" else report.comparison)
    if report.comparison is not None:
        rec.add("crossings.dk_exact", report.comparison, exact=False)
    if config.mode == "theoretical":
        rec.check(report.total <= theoretical_cap * (1 + 1e-12),
                  "Stein normal bound 12920 n^(-1/2)", f"total {report.total:.17g}")
    rec.check(report.dominates, "size-bias Stein bound dominates the exact Kolmogorov distance",
              f"total {report.total:.17g} < {report.comparison}")


def _simple_pmf(config):
    pmf = limitlab.simple_chord_pmf_exact(config.n)
    if config.corrupt_pmf:
        logger.warning("Injecting a corrupted simple-chord PMF")
        pmf = limitlab.Pmf({x: 5 * w for x, w in pmf.items()}, validate=False)
    return pmf


def cmd_distance(config, rec):
    n = config.n
    if config.kind == "tv-poisson":
        lam = Fraction(2 * n, 2 * n - 1)
        distance = limitlab.tv_distance_to_poisson(_simple_pmf(config), float(lam), config.poisson_tail)
        bound = limitlab.tv_bound_simple(n)[2]
        rec.add("simple_chords.tv_poisson_lambda_n", distance, exact=False, bound=bound)
        rec.check(distance <= float(bound), "simple-chord Poisson bound 10n/(2n-1)^2",
                  f"d_TV = {distance:.17g} > {float(bound):.17g}")
        rec.check(0.0 <= distance <= 1.0, "total variation distance lies in [0, 1]", distance)
    elif config.kind == "tv-poisson-one":
        lam = 2 * n / (2 * n - 1)
        distance = limitlab.tv_distance_to_poisson(_simple_pmf(config), 1.0, config.poisson_tail)
        bound = float(limitlab.tv_bound_simple(n)[2]) + limitlab.poisson_tv_between(lam, 1.0)
        rec.add("simple_chords.tv_poisson_one", distance, exact=False, bound=bound)
        rec.check(distance <= bound, "simple-chord Poisson(1) bound 10n/(2n-1)^2 + d_TV(Po(lambda_n), Po(1))",
                  f"d_TV = {distance:.17g} > {bound:.17g}")
    elif config.kind == "kolmogorov":
        bound = limitlab.STEIN_NORMAL_CONSTANT / math.sqrt(n)
        if config.samples > 0:
            record = mc_estimate("crossings", n, config.samples, config.seed, config.workers,
                                 kind="dk", chunk_size=config.chunk_size, command=config.command)
            record.bound = bound
            rec.records.append(record)
            distance = record.ci_low
        else:
            if n < 2:
                raise UsageError("--n", "the crossing number is degenerate for n = 1")
            mu, var = chord_statistics.crossing_mean_variance(n)
            distance = limitlab.kolmogorov_distance_to_normal(
                limitlab.crossing_pmf_exact(n), mu, math.sqrt(var))
            rec.add("crossings.dk_exact", distance, exact=False, bound=bound)
        rec.check(distance <= bound, "crossing Kolmogorov bound 12920 n^(-1/2)",
                  f"d_K = {distance:.17g} > {bound:.17g}")
    else:
        if config.samples > 0:
            values = draw_statistic("length_j", n, config.samples, config.seed, config.workers,
                                    config.chunk_size, config.j)
            pmf = limitlab.Pmf.from_counts(Counter(int(v) for v in values))
        elif n <= LENGTH_EXACT_LIMIT:
            pmf = limitlab.length_j_pmf_exact(n, config.j)
        else:
            raise UsageError("--samples", f"tv-length is exact only up to n={LENGTH_EXACT_LIMIT}")
        distance = limitlab.tv_distance_to_poisson(pmf, 1.0, config.poisson_tail)
        rec.add(f"length[{config.j}].tv_poisson_one", distance, exact=False)


def cmd_report(config, rec):
    """Every claim at desk scale, one record per check"""
    example = diagram_core.from_pairs([(1, 8), (2, 9), (3, 4), (5, 7), (6, 10), (11, 12)])
    summary = chord_statistics.diagram_stats(example)
    for name, expected in (("crossings", 4), ("nestings", 4), ("components", 3), ("simple_chords", 2)):
        value = getattr(summary, name)
        rec.add(f"example.{name}", value, bound=expected)
        rec.check(value == expected, f"example diagram has {expected} {name}", value)

    dk = {}
    for n in range(2, 31):
        pmf = limitlab.crossing_pmf_exact(n)
        mu, var = chord_statistics.crossing_mean_variance(n)
        rec.check(pmf.mean() == mu and pmf.variance() == var,
                  f"crossing moments at n={n}", f"{pmf.mean()}, {pmf.variance()}")
        rec.check(pmf[0] == Fraction(diagram_core.catalan(n), diagram_core.num_diagrams(n)),
                  f"Catalan non-crossing count at n={n}", str(pmf[0]))
        distance = dk[n] = limitlab.kolmogorov_distance_to_normal(pmf, mu, math.sqrt(var))
        bound = limitlab.STEIN_NORMAL_CONSTANT / math.sqrt(n)
        rec.add(f"crossings.dk_exact[{n}]", distance, exact=False, bound=bound)
        rec.check(distance <= bound, f"crossing Kolmogorov bound at n={n}", distance)
    rec.check(dk[30] < dk[5] < dk[2], "crossing Kolmogorov distance shrinks from n=2 to n=30",
              f"{dk[2]:.6g}, {dk[5]:.6g}, {dk[30]:.6g}")

    for n in range(2, 11):
        distance = limitlab.tv_distance_to_poisson(limitlab.simple_chord_pmf_exact(n),
                                                   2 * n / (2 * n - 1), config.poisson_tail)
        bound = limitlab.tv_bound_simple(n)[2]
        rec.add(f"simple_chords.tv_poisson[{n}]", distance, exact=False, bound=bound)
        rec.check(distance <= float(bound), f"simple-chord Poisson bound at n={n}", distance)

    for n in range(1, 41):
        ratio = float(Fraction(limitlab.simple_chord_free_count(n), diagram_core.num_diagrams(n)))
        lower, upper = limitlab.scfree_bounds(n)
        rec.check(lower <= ratio <= upper, f"simple-chord-free bounds at n={n}", ratio)
    rec.add("scfree.checked_up_to", 40)

    for statistic, sizes in (("crossings", (2, 3)), ("simple_chords", (2, 3, 4))):
        for n in sizes:
            report = sizebias.verify_size_bias_exact(n, statistic)
            rec.add(f"{statistic}.match[{n}]", "true" if report.match else "false")
            rec.check(report.match, f"size-bias coupling for {statistic} at n={n}", report.error)

    for n in range(2, config.exact_limit + 1):
        term = limitlab.sb_variance_term(n, "exact")
        bound = limitlab.VARIANCE_TERM_CONSTANT * n
        rec.add(f"stein.variance_term[{n}]", term.exact, bound=bound)
        rec.check(term.value <= bound, f"variance term bound 432^2 n at n={n}", term.value)
        report = limitlab.stein_normal_bound(n, "empirical", method="exact")
        rec.add(f"stein.total[{n}]", report.total, exact=False, bound=report.comparison)
        rec.check(report.dominates, f"Stein bound dominance at n={n}", report.total)


HANDLERS = {
    "sample": cmd_sample,
    "stats": cmd_stats,
    "exact-crossings": cmd_exact_crossings,
    "exact-simple": cmd_exact_simple,
    "scfree": cmd_scfree,
    "sb-verify": cmd_sb_verify,
    "stein-bound": cmd_stein_bound,
    "distance": cmd_distance,
    "report": cmd_report,
}


def run(config):
    """
    Execute one experiment. Returns (exit status, records): 0 on success,
    1 on a usage error, 2 when a verified claim fails.
    """
    try:
        config.validate()
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE, []

    logger.info(f"Running {config.command} with n={config.n}, seed={config.seed}, "
                f"samples={config.samples}, workers={config.workers}")
    rec = Recorder(config)
    try:
        HANDLERS[config.command](config, rec)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE, rec.records
    except AssertionError as e:
        logger.exception(f"{config.command} broke an internal invariant: {e}")
        return EXIT_VERIFICATION, rec.records
    except ValueError as e:
        logger.exception(f"{config.command} failed: {e}")
        return EXIT_USAGE, rec.records

    if rec.failures:
        for failure in rec.failures:
            logger.error(f"Verification failed: {failure}")
        return EXIT_VERIFICATION, rec.records
    logger.info(f"{config.command} finished with {len(rec.records)} records")
    return EXIT_OK, rec.records

