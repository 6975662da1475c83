"""Managed repeated games with no-regret information sharing.

Players privately report observations and baseline actions each round; the
manager returns suggested actions that maximize a concave function of
time-average utilities while guaranteeing every player does at least as well
as its baseline, on average or round by round.  An exhaustive lookahead
benchmark and a simulation harness verify the deterministic guarantees on
arbitrary event sequences.
"""

__version__ = "0.1.0"
