"""Oracle-call and sample bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class CallCounter:
    """Running totals for one procedure run.

    ``oracle_calls`` counts base-oracle invocations (SAA solves, SPEG runs,
    MOGDA runs); ``grad_calls`` counts mini-batch gradient evaluations, which
    are reported at a fractional weight in experiment summaries.
    """

    oracle_calls: int = 0
    grad_calls: int = 0
    oracle_samples: int = 0
    grad_samples: int = 0

    @property
    def samples(self) -> int:
        return self.oracle_samples + self.grad_samples

    def weighted_calls(self, grad_weight: float = 0.1) -> float:
        return self.oracle_calls + grad_weight * self.grad_calls

    def add_oracle(self, samples: int):
        self.oracle_calls += 1
        self.oracle_samples += int(samples)

    def add_grad(self, samples: int):
        self.grad_calls += 1
        self.grad_samples += int(samples)

    def merge(self, other: CallCounter):
        self.oracle_calls += other.oracle_calls
        self.grad_calls += other.grad_calls
        self.oracle_samples += other.oracle_samples
        self.grad_samples += other.grad_samples


def _noop(counter):
    return counter if counter is not None else CallCounter()
