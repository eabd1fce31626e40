"""Sequence-function optimization: greedy, exact oracle, definitional checker.

A sequence function assigns a real value to an ordered list of ground-set
element indices; reordering may change the value. The central property here,
ordered submodularity, requires for all repetition-free prefixes A, suffixes
B and elements s, t:

    f(A + [s]) - f(A)  >=  f(A + [s] + B) - f(A + [t] + B)

For nonnegative objectives with this property, building a list greedily (best
marginal gain per step, lowest index on ties) is a 2-approximation to the
best length-k sequence, and the factor 2 is tight; see
ordsub.instances.tightness_instance for an instance family realizing it.

Objectives are wrapped as SequenceFn, which carries an optional vectorized
batch evaluator. Solvers and the checker only call the batch path, so a
numba-jitted kernel (see ordsub._backend) accelerates everything at once.
Scalar calls are routed through a one-row batch, which keeps single values
bit-identical to batched ones.
"""

import dataclasses
import itertools
import math
import operator
from typing import Callable, Iterable, NamedTuple

import numpy as np

__all__ = [
    "ObjectiveError",
    "BudgetError",
    "SpecificationError",
    "UndefinedRatioError",
    "SequenceFn",
    "SolveResult",
    "Violation",
    "SubmodularityReport",
    "evaluate",
    "greedy_maximize",
    "brute_force_optimum",
    "approximation_ratio",
    "compare",
    "check_ordered_submodularity",
    "linear_combination",
    "prefix_threshold_fn",
    "rank_weighted_fn",
    "DEFAULT_BUDGET",
    "DEFAULT_TOLERANCE",
]

DEFAULT_BUDGET = 10_000_000
DEFAULT_TOLERANCE = 1e-9


class ObjectiveError(RuntimeError):
    """An objective produced a non-finite value where a finite one is required."""


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured evaluation budget."""


class SpecificationError(ValueError):
    """Declared objective constants are inconsistent with computed values."""


class UndefinedRatioError(ValueError):
    """Greedy/optimum ratio refused because the optimum value is not positive."""


class SequenceFn:
    """A deterministic real-valued function on sequences of element indices.

    Parameters
    ----------
    evaluate : callable mapping a tuple of ints to a float, or None when a
        batch evaluator is supplied instead.
    ground_size : number of elements n; valid indices are 0..n-1.
    name : human-readable label used in reports and error messages.
    batch_evaluate : optional callable mapping a (B, L) int64 array (one
        sequence per row, all rows the same length) to a (B,) float array.
    max_len : optional hard cap on sequence length (objectives defined only
        up to a fixed number of positions).

    Evaluation must be pure: same sequence, same value, no side effects.
    """

    __slots__ = ("_scalar", "_batch", "ground_size", "name", "max_len")

    def __init__(self, evaluate: Callable | None, ground_size: int,
                 name: str = "", batch_evaluate: Callable | None = None,
                 max_len: int | None = None):
        if evaluate is None and batch_evaluate is None:
            raise ValueError("need a scalar or a batch evaluator")
        self._scalar = evaluate
        self._batch = batch_evaluate
        self.ground_size = operator.index(ground_size)
        if self.ground_size < 1:
            raise ValueError("ground_size must be >= 1")
        self.name = name
        self.max_len = None if max_len is None else operator.index(max_len)

    def _coerce(self, seq) -> tuple[int, ...]:
        try:
            items = tuple(operator.index(x) for x in seq)
        except TypeError as exc:
            raise ValueError(f"sequence items must be integers: {seq!r}") from exc
        for x in items:
            if not 0 <= x < self.ground_size:
                raise ValueError(
                    f"element index {x} out of range for ground size {self.ground_size}")
        if self.max_len is not None and len(items) > self.max_len:
            raise ValueError(
                f"sequence of length {len(items)} exceeds the objective's "
                f"maximum length {self.max_len}")
        return items

    def __call__(self, seq) -> float:
        items = self._coerce(seq)
        if self._batch is not None:
            arr = np.empty((1, len(items)), dtype=np.int64)
            arr[0, :] = items
            value = float(self._batch(arr)[0])
        else:
            value = float(self._scalar(items))
        if not math.isfinite(value):
            raise ObjectiveError(
                f"objective {self.name or '<unnamed>'} returned non-finite "
                f"value {value!r} on sequence {list(items)}")
        return value

    def evaluate_batch(self, seqs) -> np.ndarray:
        """Evaluate many same-length sequences at once.

        Index validation is skipped on this hot path; the solvers and the
        checker only generate in-range indices.
        """
        arr = np.ascontiguousarray(seqs, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D (batch, length) index array")
        if self._batch is not None:
            return np.asarray(self._batch(arr), dtype=np.float64)
        out = np.empty(arr.shape[0])
        for i in range(arr.shape[0]):
            out[i] = float(self._scalar(tuple(int(x) for x in arr[i])))
        return out

    def __repr__(self):
        return (f"SequenceFn(name={self.name!r}, ground_size={self.ground_size}"
                + (f", max_len={self.max_len}" if self.max_len is not None else "")
                + ")")


@dataclasses.dataclass(frozen=True)
class SolveResult:
    """Outcome of a solver run.

    value is re-checked at construction time by the solvers (it always equals
    a fresh evaluation of sequence). ratio is value / optimum_value when the
    optimum is known and positive, else None.
    """
    sequence: tuple[int, ...]
    value: float
    optimum_value: float | None = None
    ratio: float | None = None
    evaluations: int = 0


class Violation(NamedTuple):
    prefix: tuple[int, ...]
    element: int
    alternative: int
    suffix: tuple[int, ...]
    lhs: float
    rhs: float


@dataclasses.dataclass(frozen=True)
class SubmodularityReport:
    """Result of an exhaustive ordered-submodularity check.

    holds is True iff violations is empty. checked counts inequality
    instances tested. Each violation records (prefix A, appended element s,
    alternative element t, suffix B, lhs, rhs) with lhs < rhs - tolerance.
    """
    holds: bool
    violations: tuple[Violation, ...]
    checked: int


def evaluate(fn: SequenceFn, seq) -> float:
    """Evaluate fn on one sequence, validating element indices."""
    return fn(seq)


def _assert_finite(values: np.ndarray, fn: SequenceFn, rows) -> None:
    finite = np.isfinite(values)
    if not finite.all():
        i = int(np.argmin(finite))
        raise ObjectiveError(
            f"objective {fn.name or '<unnamed>'} returned non-finite value "
            f"{values[i]!r} on sequence {list(map(int, rows[i]))}")


def greedy_maximize(fn: SequenceFn, k: int, allow_repeats: bool = False) -> SolveResult:
    """Build a length-k sequence by appending the best marginal element.

    Ties are broken toward the lowest element index. Candidate evaluations
    per step go through the batch path, so steps are deterministic regardless
    of backend or thread count.
    """
    k = operator.index(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    n = fn.ground_size
    if not allow_repeats and k > n:
        raise ValueError(f"k={k} exceeds ground-set size {n} with repeats disallowed")
    if fn.max_len is not None and k > fn.max_len:
        raise ValueError(f"k={k} exceeds the objective's maximum length {fn.max_len}")

    prefix: list[int] = []
    evaluations = 0
    for _ in range(k):
        if allow_repeats:
            candidates = np.arange(n, dtype=np.int64)
        else:
            used = set(prefix)
            candidates = np.array([c for c in range(n) if c not in used],
                                  dtype=np.int64)
        batch = np.empty((candidates.size, len(prefix) + 1), dtype=np.int64)
        if prefix:
            batch[:, :-1] = prefix
        batch[:, -1] = candidates
        values = fn.evaluate_batch(batch)
        _assert_finite(values, fn, batch)
        evaluations += int(candidates.size)
        prefix.append(int(candidates[int(np.argmax(values))]))
    sequence = tuple(prefix)
    return SolveResult(sequence, fn(sequence), evaluations=evaluations)


def brute_force_optimum(fn: SequenceFn, k: int, allow_repeats: bool = False,
                        budget: int = DEFAULT_BUDGET,
                        chunk_size: int = 32768) -> SolveResult:
    """Exact optimum over all length-k sequences by exhaustive enumeration.

    Enumeration is lexicographic over index tuples and the reduction keeps
    the earlier sequence on exact value ties, so the result is deterministic
    no matter how evaluations are chunked.
    """
    k = operator.index(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    n = fn.ground_size
    if not allow_repeats and k > n:
        raise ValueError(f"k={k} exceeds ground-set size {n} with repeats disallowed")
    if fn.max_len is not None and k > fn.max_len:
        raise ValueError(f"k={k} exceeds the objective's maximum length {fn.max_len}")

    count = n ** k if allow_repeats else math.perm(n, k)
    if count > budget:
        raise BudgetError(
            f"exhaustive search over length-{k} sequences needs {count} "
            f"evaluations, exceeding the budget of {budget}")

    if allow_repeats:
        space = itertools.product(range(n), repeat=k)
    else:
        space = itertools.permutations(range(n), k)

    best_seq: tuple[int, ...] | None = None
    best_val = -math.inf
    while True:
        rows = list(itertools.islice(space, chunk_size))
        if not rows:
            break
        arr = np.array(rows, dtype=np.int64)
        values = fn.evaluate_batch(arr)
        _assert_finite(values, fn, arr)
        i = int(np.argmax(values))
        # strict > keeps the lexicographically earliest maximizer across chunks
        if float(values[i]) > best_val:
            best_val = float(values[i])
            best_seq = rows[i]
    assert best_seq is not None
    return SolveResult(best_seq, fn(best_seq), evaluations=count)


def approximation_ratio(fn: SequenceFn, k: int, allow_repeats: bool = False,
                        budget: int = DEFAULT_BUDGET) -> float:
    """Greedy value divided by the exact optimum value.

    Raises UndefinedRatioError when the optimum is <= 0: for sign-varying
    objectives the quotient carries no approximation meaning.
    """
    greedy = greedy_maximize(fn, k, allow_repeats)
    exact = brute_force_optimum(fn, k, allow_repeats, budget=budget)
    if exact.value <= 0.0:
        raise UndefinedRatioError(
            f"optimum value {exact.value!r} is not positive; the greedy/optimum "
            f"ratio is undefined for sign-varying objectives")
    return greedy.value / exact.value


def compare(fn: SequenceFn, k: int, allow_repeats: bool = False,
            budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Run greedy and the oracle on the same problem, merged into one result.

    The returned sequence/value are greedy's; optimum_value is the oracle's;
    ratio is None when the optimum is not positive.
    """
    greedy = greedy_maximize(fn, k, allow_repeats)
    exact = brute_force_optimum(fn, k, allow_repeats, budget=budget)
    ratio = greedy.value / exact.value if exact.value > 0.0 else None
    return SolveResult(greedy.sequence, greedy.value, exact.value, ratio,
                       greedy.evaluations + exact.evaluations)


def _count_checker_tuples(n: int, max_total_len: int) -> int:
    total = 0
    for a in range(max_total_len):
        for b in range(max_total_len - a):
            prefixes = math.perm(n, a)
            same = (n - a) * math.perm(n - a - 1, b)
            if n - a >= 2:
                diff = (n - a) * (n - a - 1) * math.perm(n - a - 2, b)
            else:
                diff = 0
            total += prefixes * (same + diff)
    return total


def _value_table(fn: SequenceFn, n: int, max_len: int) -> dict:
    """Evaluate every repetition-free sequence up to max_len, batched by length."""
    table: dict[tuple[int, ...], float] = {}
    for length in range(max_len + 1):
        seqs = list(itertools.permutations(range(n), length))
        arr = np.array(seqs, dtype=np.int64).reshape(len(seqs), length)
        values = fn.evaluate_batch(arr)
        _assert_finite(values, fn, arr)
        table.update(zip(seqs, values.tolist()))
    return table


def check_ordered_submodularity(fn: SequenceFn, max_total_len: int,
                                tolerance: float = DEFAULT_TOLERANCE,
                                budget: int = DEFAULT_BUDGET) -> SubmodularityReport:
    """Exhaustively test the defining inequality up to a total length.

    Enumerates every repetition-free tuple (A, s, t, B) with
    len(A) + 1 + len(B) <= max_total_len, s and t outside A, B disjoint from
    A + [s] and from t. t == s is included (that case reduces to prefix
    monotonicity f(A + [s]) >= f(A)). A violation is recorded when

        f(A+[s]) - f(A)  <  f(A+[s]+B) - f(A+[t]+B) - tolerance.

    If the objective caps sequence length, max_total_len is reduced to the
    cap. Raises BudgetError when the tuple count exceeds the budget.
    """
    max_total_len = operator.index(max_total_len)
    if max_total_len < 1:
        raise ValueError("max_total_len must be >= 1")
    n = fn.ground_size
    if fn.max_len is not None:
        max_total_len = min(max_total_len, fn.max_len)

    total = _count_checker_tuples(n, max_total_len)
    if total > budget:
        raise BudgetError(
            f"checking needs {total} inequality instances, exceeding the "
            f"budget of {budget}")

    values = _value_table(fn, n, max_total_len)
    violations: list[Violation] = []
    checked = 0
    for a in range(max_total_len):
        for A in itertools.permutations(range(n), a):
            in_prefix = set(A)
            f_A = values[A]
            for s in range(n):
                if s in in_prefix:
                    continue
                lhs = values[A + (s,)] - f_A
                for t in range(n):
                    if t in in_prefix:
                        continue
                    pool = [x for x in range(n)
                            if x not in in_prefix and x != s and x != t]
                    for b in range(max_total_len - a):
                        for B in itertools.permutations(pool, b):
                            rhs = values[A + (s,) + B] - values[A + (t,) + B]
                            checked += 1
                            if lhs < rhs - tolerance:
                                violations.append(
                                    Violation(A, s, t, B, lhs, rhs))
    assert checked == total
    return SubmodularityReport(not violations, tuple(violations), checked)


def linear_combination(terms: Iterable[tuple[float, SequenceFn]],
                       name: str = "linear-combination") -> SequenceFn:
    """Nonnegative weighted sum of sequence functions on one ground set.

    Such combinations preserve ordered submodularity.
    """
    pairs = [(float(c), f) for c, f in terms]
    if not pairs:
        raise ValueError("need at least one (coefficient, fn) term")
    for c, _ in pairs:
        if not (c >= 0.0):
            raise ValueError("coefficients must be >= 0")
    n = pairs[0][1].ground_size
    if any(f.ground_size != n for _, f in pairs):
        raise ValueError("all terms must share one ground-set size")
    caps = [f.max_len for _, f in pairs if f.max_len is not None]
    max_len = min(caps) if caps else None

    def batch(seqs: np.ndarray) -> np.ndarray:
        out = np.zeros(seqs.shape[0])
        for c, f in pairs:
            if c != 0.0:
                out += c * f.evaluate_batch(seqs)
        return out

    return SequenceFn(None, n, name=name, batch_evaluate=batch, max_len=max_len)


def prefix_threshold_fn(set_fn: Callable, threshold: int, ground_size: int,
                        name: str = "prefix-threshold") -> SequenceFn:
    """Sequence function applying a set function to the first t elements.

    set_fn receives a frozenset of indices. For monotone submodular set_fn
    the result is ordered-submodular.
    """
    t = operator.index(threshold)
    if t < 1:
        raise ValueError("threshold must be >= 1")

    def scalar(seq: tuple[int, ...]) -> float:
        return float(set_fn(frozenset(seq[:t])))

    return SequenceFn(scalar, ground_size, name=name)


def rank_weighted_fn(set_fn: Callable, weights, ground_size: int,
                     name: str = "rank-weighted") -> SequenceFn:
    """Position-discounted accumulation of a set function's marginal gains.

    f(S) = sum_i w[i] * (h(first i+1 elements) - h(first i elements)) where
    h = set_fn on frozensets. Weights must be nonnegative and weakly
    decreasing; with monotone submodular h this is ordered-submodular.
    Sequences longer than the weight vector are rejected.
    """
    w = np.asarray(list(weights), dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-D vector")
    if np.any(w < 0.0) or np.any(np.diff(w) > 0.0):
        raise ValueError("weights must be nonnegative and weakly decreasing")

    def scalar(seq: tuple[int, ...]) -> float:
        total = 0.0
        seen: set[int] = set()
        prev = float(set_fn(frozenset()))
        for i, x in enumerate(seq):
            seen.add(int(x))
            cur = float(set_fn(frozenset(seen)))
            total += float(w[i]) * (cur - prev)
            prev = cur
        return total

    return SequenceFn(scalar, ground_size, name=name, max_len=int(w.size))
