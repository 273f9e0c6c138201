"""Front-door decode(): validate, resolve auto to a concrete kernel, run it.

The default policy encodes the empirically-best backend per input shape.
It is a heuristic rule table, not a measurement; it can be replaced by a
plain-text policy file (one rule per line, first match wins):

    batch_min,batch_max,seq_min,seq_max,mask,method

with `*` as a wildcard and mask one of {binary, decay, *}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .kernels import BlockParams, MethodId, run_method
from .tensor import AttnInputs, validate_inputs

POLICY_ENV_VAR = "LINATTN_POLICY"


@dataclass(frozen=True)
class PolicyRule:
    batch_min: int | None
    batch_max: int | None
    seq_min: int | None
    seq_max: int | None
    mask: str | None  # "binary", "decay", or None for any
    method: MethodId

    def matches(self, batch: int, seqlen: int, decay: bool) -> bool:
        if self.batch_min is not None and batch < self.batch_min:
            return False
        if self.batch_max is not None and batch > self.batch_max:
            return False
        if self.seq_min is not None and seqlen < self.seq_min:
            return False
        if self.seq_max is not None and seqlen > self.seq_max:
            return False
        if self.mask is not None and self.mask != ("decay" if decay else "binary"):
            return False
        return True

    def describe(self) -> str:
        def span(lo, hi):
            return f"{lo if lo is not None else '*'}..{hi if hi is not None else '*'}"

        mask = self.mask if self.mask is not None else "*"
        return (
            f"batch {span(self.batch_min, self.batch_max)}, "
            f"seqlen {span(self.seq_min, self.seq_max)}, mask {mask} "
            f"-> {self.method.value}"
        )


@dataclass(frozen=True)
class DispatchPolicy:
    rules: tuple
    default: MethodId = MethodId.TWO_LEVEL_BLOCK

    def resolve(self, batch: int, seqlen: int, decay: bool):
        """First matching rule wins; depends only on shapes and mask kind."""
        for rule in self.rules:
            if rule.matches(batch, seqlen, decay):
                return rule.method, rule.describe()
        return self.default, f"default -> {self.default.value}"


def default_policy() -> DispatchPolicy:
    # Short single-batch binary prompts: the dense product wins on setup cost.
    # Long single-batch prompts: the intra/inter block kernel. Large batches:
    # the row recurrence. Everything else: the block kernel.
    return DispatchPolicy(
        rules=(
            PolicyRule(1, 1, None, 128, "binary", MethodId.VANILLA),
            PolicyRule(1, 1, 129, None, None, MethodId.TWO_LEVEL_BLOCK),
            PolicyRule(16, None, None, None, None, MethodId.ROW_BASED),
        ),
        default=MethodId.TWO_LEVEL_BLOCK,
    )


def _parse_bound(tok: str):
    tok = tok.strip()
    if tok == "*":
        return None
    try:
        return int(tok)
    except ValueError:
        raise UsageError(f"bad policy bound {tok!r} (expected integer or '*')")


def parse_policy(text: str) -> DispatchPolicy:
    """Parse the plain-text rule format documented in the module docstring."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 6:
            raise UsageError(f"policy line {lineno}: expected 6 comma-separated fields, got {len(parts)}")
        mask = None if parts[4] == "*" else parts[4]
        if mask not in (None, "binary", "decay"):
            raise UsageError(f"policy line {lineno}: mask must be binary, decay or '*', got {parts[4]!r}")
        method = MethodId.parse(parts[5])
        if method is MethodId.AUTO:
            raise UsageError(f"policy line {lineno}: a rule cannot resolve to auto")
        rules.append(PolicyRule(
            _parse_bound(parts[0]), _parse_bound(parts[1]),
            _parse_bound(parts[2]), _parse_bound(parts[3]),
            mask, method,
        ))
    return DispatchPolicy(rules=tuple(rules))


def load_policy(path: str) -> DispatchPolicy:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_policy(fh.read())


def explain(inputs: AttnInputs, policy: DispatchPolicy | None = None):
    """Resolve auto for these inputs without executing any kernel."""
    validate_inputs(inputs)
    if policy is None:
        policy = default_policy()
    return policy.resolve(inputs.batch, inputs.seqlen, inputs.decay)


def decode(
    inputs: AttnInputs,
    method: MethodId = MethodId.AUTO,
    policy: DispatchPolicy | None = None,
    params: BlockParams | None = None,
) -> np.ndarray:
    """Run the requested (or auto-resolved) kernel and return the output."""
    validate_inputs(inputs)
    if method is MethodId.AUTO:
        method, _ = explain(inputs, policy)
    out, _ = run_method(method, inputs, params)
    return out
