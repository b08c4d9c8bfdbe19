"""Convention choices that downstream results depend on; their hash keys caches and reports."""
from __future__ import annotations

import hashlib
import json

VERSION = 1

CONVENTIONS = {
    "pochhammer": "(a;p)_inf = prod_{k>=0} (1 - a p^k)",
    "xi": "unique monomial making both duality maps intertwiners",
    "ybe": "R12(z/w) R13(z) R23(w) = R23(w) R13(z) R12(z/w)",
    "intertwining": "R(z) Delta(g) = Delta'(g) R(z)",
    "invariant_normalization": "coefficient of v_1 (x) v_-1 equals 1",
    "relation_form": ("sum_k f_k Psi_a(m-k) Psi_b(n+k) - sum_k h_k[(a,b),(d,c)] Psi_c(n-k) Psi_d(m+k)"
                      " = delta_{m+n,0} xi^(-m-s) F_ab, s = 1/2 on the half lattice, 0 on Z"),
    "h_coefficients": "h_k[(a,b),(d,c)] = [z^k] G(z) Rbar_{(b,a),(c,d)}(z)",
    "F": "(xi/x;p)(q^-2/x;p) / ((1/x;p)(q^-2 xi/x;p)) in 1/x",
    "G": "F(1/x) (1 - q^2 x)/(x - q^2) = -q^-2 (1 - q^2 x)(xi x;p)(q^-2 xi^2 x;p) / ((x;p)(q^-2 xi x;p)) in x",
    "vacuum": "positive modes and zero modes of negative colours annihilate",
    "zero_mode_B": "Psi_0(0) vacuum = vacuum after rescaling F by the vacuum value of Psi_0(0)^2",
    "modular_prime": "p < 2**26, residues stored as float64",
    "L_operator": "F(q^2 xi) Phi_j(z q^2) Phi*_i(z), Phi*_i(z) = q^bar(-i) Psi_-i(z / xi)",
    "exchange_expansion": "both sides in powers of w/z; Rbar(x)^-1 = P Rbar(1/x) P",
}


def ledger_hash() -> str:
    blob = json.dumps({"version": VERSION, **CONVENTIONS}, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
