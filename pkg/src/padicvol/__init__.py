"""Exact arithmetic engine for volumes, torsors and character sums over F_q((t)).

Modules:

* fields     -- finite fields F_{p^r}, extensions, exact linear algebra
* series     -- truncated Laurent series with tame ramified roots
* volumes    -- exact values in Q[q^(-1/N)] and interval enclosures
* integrate  -- Haar-measure integration on O^n, scheme point counts
* orbifold   -- twisted inertia of [A^n/Gamma], weights, fiber volumes
* torsor     -- Gamma-torsors over F_q((t)) by tame cocycle pairs
* hasse      -- gerbe invariants on B(mu_N) and the specialisation identity
* fourier    -- exact character sums over finite abelian groups
* neron      -- elliptic curve counts and degree-2 isogeny invariance
* cli        -- JSON-spec command line driver with oracle cross-checks
"""

__version__ = "1.0.0"
