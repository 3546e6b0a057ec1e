"""Independent high-precision oracle for values frozen into the C++ tests.

Everything here is evaluated with mpmath at 50 digits, directly from the
defining formulas (constrained projection for the rates, canonical sums for
equilibrium quantities). Nothing in this file calls the C++ library.
"""
import mpmath as mp

mp.mp.dps = 50


def shannon(p):
    return -mp.fsum(x * mp.log(x) for x in p if x > 0)


def rates_by_projection(p, e, tau=1):
    # dp_j/dt = -(1/tau) p_j (ln p_j + a + b e_j), (a, b) chosen so that the
    # rates conserve trace and energy: a p-weighted least-squares projection.
    idx = [i for i, x in enumerate(p) if x > 0]
    M = mp.matrix(2, 2)
    rhs = mp.matrix(2, 1)
    m1 = mp.fsum(p[i] * e[i] for i in idx)
    m2 = mp.fsum(p[i] * e[i] ** 2 for i in idx)
    A = mp.fsum(p[i] * mp.log(p[i]) for i in idx)
    B = mp.fsum(p[i] * e[i] * mp.log(p[i]) for i in idx)
    M[0, 0], M[0, 1], M[1, 0], M[1, 1] = 1, m1, m1, m2
    rhs[0], rhs[1] = -A, -B
    a, b = mp.lu_solve(M, rhs)
    out = []
    for j in range(len(p)):
        if p[j] > 0:
            out.append(-(p[j] * (mp.log(p[j]) + a + b * e[j])) / tau)
        else:
            out.append(mp.mpf(0))
    return out


def canonical(beta, e, support=None):
    support = support if support is not None else range(len(e))
    w = [mp.exp(-beta * e[i]) if i in support else mp.mpf(0) for i in range(len(e))]
    z = mp.fsum(w)
    return [x / z for x in w]


def energy(p, e):
    return mp.fsum(a * b for a, b in zip(p, e))


def beta_of(E, e, support=None):
    return mp.findroot(lambda b: energy(canonical(b, e, support), e) - E, 0.5)


def show(name, v):
    if isinstance(v, (list, tuple)):
        print(name, "=", "{" + ", ".join(mp.nstr(x, 20) for x in v) + "}")
    else:
        print(name, "=", mp.nstr(v, 20))


e3 = [mp.mpf(0), mp.mpf(1), mp.mpf(2)]
p = [mp.mpf("0.5"), mp.mpf("0.2"), mp.mpf("0.3")]

show("xlogx(0.5)", mp.mpf("0.5") * mp.log(mp.mpf("0.5")))
show("entropy(0.5,0.2,0.3)", shannon(p))
r = rates_by_projection(p, e3)
show("rates(0.5,0.2,0.3)", r)
show("dSdt(0.5,0.2,0.3)", -mp.fsum(ri * mp.log(pi) for ri, pi in zip(r, p)))

b08 = beta_of(mp.mpf("0.8"), e3)
show("beta(E=0.8,(0,1,2))", b08)
show("canonical(beta(0.8))", canonical(b08, e3))

# partial canonical for a 4-level spectrum (0,1,2,3), support {0,2,3}
e4 = [mp.mpf(0), mp.mpf(1), mp.mpf(2), mp.mpf(3)]
p4 = [mp.mpf("0.5"), 0, mp.mpf("0.1"), mp.mpf("0.4")]
E4 = energy(p4, e4)
b4 = beta_of(E4, e4, [0, 2, 3])
show("E4", E4)
show("beta_pe(support {0,2,3})", b4)
show("partial canonical", canonical(b4, e4, [0, 2, 3]))

# interior state (0.2,0.6,0.2)
q = [mp.mpf("0.2"), mp.mpf("0.6"), mp.mpf("0.2")]
S0 = shannon(q)
show("S(0.2,0.6,0.2)", S0)
bmin = mp.findroot(lambda b: shannon(canonical(b, e3)) - S0, 1.0)
Emin = energy(canonical(bmin, e3), e3)
show("beta_min(S0)", bmin)
show("E_min(S0)", Emin)
show("adiabatic availability", 1 - Emin)

# composite (0,1) + (0,1,2), E_total = 1.2: equal beta
e2 = [mp.mpf(0), mp.mpf(1)]
bc = mp.findroot(lambda b: energy(canonical(b, e2), e2) + energy(canonical(b, e3), e3) - mp.mpf("1.2"), 0.5)
show("composite beta", bc)
show("composite E_A", energy(canonical(bc, e2), e2))

# available energy of p=(0.5,0.2,0.3) with T_R = 1
ref = canonical(1, e3)
show("Omega(T_R=1, p=(0.5,0.2,0.3))", (energy(p, e3) - energy(ref, e3)) - (shannon(p) - shannon(ref)))
