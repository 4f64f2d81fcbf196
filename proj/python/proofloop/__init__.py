"""Step-by-step propositional proof loop: problem sets, a symbolic engine
that checks every proposed step, and consistency auditing."""

import json

from . import _core
from ._core import (
    WIRE_VERSION,
    ProofloopError,
    canonical_text,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
    format_table_number,
    label_and_depth,
    parse_problem,
    serialize_problem,
    step_instances,
    whole_proof,
)

__all__ = [
    "WIRE_VERSION",
    "ProofloopError",
    "audit",
    "canonical_text",
    "decode_request",
    "decode_response",
    "encode_request",
    "encode_response",
    "format_table_number",
    "generate",
    "label_and_depth",
    "parse_problem",
    "run_proof",
    "serialize_problem",
    "step_instances",
    "whole_proof",
]


def generate(kind, n, seed=0, jobs=1):
    """Problem records (dicts with id, subset, text, label, depth, ...)."""
    return [json.loads(line) for line in _core.generate(kind, n, seed, jobs)]


def run_proof(text, proposer="oracle", *, cap=100, k=1, retry=True,
              shuffle_seed=None, problem_id=""):
    """Run the loop on one problem.

    `proposer` is "oracle" or a callable taking (state_text, k) and returning
    a list of candidate texts.
    """
    if proposer == "oracle":
        if k != 1 or not retry:
            raise ValueError("the oracle takes no k or retry settings")
        line = _core.run_oracle(text, cap, shuffle_seed, problem_id)
    else:
        line = _core.run_callback(text, proposer, cap, k, retry, shuffle_seed,
                                  problem_id)
    return json.loads(line)


def audit(text, trace):
    """Verdict dict for a trace dict produced by run_proof."""
    return json.loads(_core.audit(text, json.dumps(trace)))
