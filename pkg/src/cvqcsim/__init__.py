"""cvqcsim — desk-scale, bit-exact simulator of a linear-time classical
verification protocol stack for quantum computations.

Layers, bottom up:

* ``bits`` / ``oracle`` — fixed-width bitstrings; seeded random-oracle model.
* ``tables`` — keyed encryption rows and phase/combine lookup tables.
* ``ntcf`` — mock claw-free trapdoor function pair (hidden-shift permutation).
* ``gadget`` — exact two-branch server states and their measurements.
* ``protocol`` — one state-preparation session: setup, phase injection,
  the sub-tests, and the session dispatcher.
* ``adversary`` — server strategies (honest and tampering) behind hooks.
* ``amplify`` — repetition wrappers and the top-level verification driver.
* ``harness`` / ``cli`` — batch statistics, scaling bench, command line.
"""

from __future__ import annotations

__version__ = "0.1.0"
