#!/usr/bin/env python3
# Copyright 2026 The mpqc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the 30-program benchmark suite as OpenQASM 2.0.

The programs are small textbook kernels named after the corresponding
QASMBench entries. Multi-controlled and controlled-phase gates are expanded
into the supported basis (u1/u2/u3, rotations, Cliffords, t, cx, swap).
"""

import math
import pathlib

PI = math.pi


class Prog:
    def __init__(self, n, measure=True):
        self.n = n
        self.lines = []
        self.measure = measure

    def g(self, name, *qs, params=()):
        p = "(" + ",".join(_fmt(x) for x in params) + ")" if params else ""
        self.lines.append(f"{name}{p} " + ",".join(f"q[{q}]" for q in qs) + ";")

    def __getattr__(self, name):
        if name in {"h", "x", "y", "z", "s", "sdg", "t", "tdg", "cx", "swap"}:
            return lambda *qs: self.g(name, *qs)
        if name in {"rx", "ry", "rz", "u1"}:
            return lambda theta, q: self.g(name, q, params=(theta,))
        raise AttributeError(name)

    def barrier(self, *qs):
        qs = qs or range(self.n)
        self.lines.append("barrier " + ",".join(f"q[{q}]" for q in qs) + ";")

    def ccx(self, a, b, c):
        self.h(c)
        self.cx(b, c); self.tdg(c)
        self.cx(a, c); self.t(c)
        self.cx(b, c); self.tdg(c)
        self.cx(a, c); self.t(b); self.t(c); self.h(c)
        self.cx(a, b); self.t(a); self.tdg(b)
        self.cx(a, b)

    def cu1(self, lam, a, b):
        self.u1(lam / 2, a)
        self.cx(a, b)
        self.u1(-lam / 2, b)
        self.cx(a, b)
        self.u1(lam / 2, b)

    def cz(self, a, b):
        self.h(b); self.cx(a, b); self.h(b)

    def cry(self, theta, a, b):
        self.ry(theta / 2, b)
        self.cx(a, b)
        self.ry(-theta / 2, b)
        self.cx(a, b)

    def zz(self, theta, a, b):
        self.cx(a, b); self.rz(theta, b); self.cx(a, b)

    def text(self):
        out = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        if self.measure:
            out.append(f"creg c[{self.n}];")
        out += self.lines
        if self.measure:
            out += [f"measure q[{i}] -> c[{i}];" for i in range(self.n)]
        return "\n".join(out) + "\n"


def _fmt(x):
    for k, s in [(1, "pi"), (0.5, "pi/2"), (0.25, "pi/4"), (-0.5, "-pi/2"), (-0.25, "-pi/4")]:
        if abs(x - k * PI) < 1e-15:
            return s
    return repr(round(x, 12))


def qft(p, qs, inverse=False):
    ops = []
    n = len(qs)
    for i in range(n):
        ops.append(("h", qs[i]))
        for j in range(i + 1, n):
            ops.append(("cu1", PI / 2 ** (j - i), qs[j], qs[i]))
    if inverse:
        ops.reverse()
    for op in ops:
        if op[0] == "h":
            p.h(op[1])
        else:
            p.cu1(-op[1] if inverse else op[1], op[2], op[3])


def adder_n10():
    # Cuccaro ripple-carry adder: cin, a0..a3, b0..b3, cout.
    p = Prog(10)
    cin, a, b, cout = 0, [1, 3, 5, 7], [2, 4, 6, 8], 9
    for q in (a[0], a[2], b[0], b[1], b[3]):
        p.x(q)

    def maj(x, y, z):
        p.cx(z, y); p.cx(z, x); p.ccx(x, y, z)

    def uma(x, y, z):
        p.ccx(x, y, z); p.cx(z, x); p.cx(x, y)

    maj(cin, b[0], a[0])
    for i in range(1, 4):
        maj(a[i - 1], b[i], a[i])
    p.cx(a[3], cout)
    for i in range(3, 0, -1):
        uma(a[i - 1], b[i], a[i])
    uma(cin, b[0], a[0])
    return p


def adder_n4():
    p = Prog(4)
    p.x(0); p.x(1); p.h(3); p.cx(2, 3)
    p.t(0); p.t(1); p.t(2); p.tdg(3)
    p.cx(0, 1); p.cx(2, 3); p.cx(3, 0); p.cx(1, 2)
    p.cx(0, 1); p.cx(2, 3)
    p.tdg(0); p.tdg(1); p.tdg(2); p.t(3)
    p.cx(0, 1); p.cx(2, 3); p.s(3); p.cx(3, 0); p.h(3)
    return p


def basis_change_n3():
    p = Prog(3)
    p.x(0)
    for (a, b), th in [((0, 1), 0.6), ((1, 2), 1.1), ((0, 1), -0.4)]:
        p.rz(PI / 2, a); p.rx(PI / 2, b)
        p.cx(a, b)
        p.ry(th, a); p.rz(th, b)
        p.cx(a, b)
        p.rx(-PI / 2, b); p.rz(-PI / 2, a)
    return p


def basis_trotter_n4():
    p = Prog(4)
    p.x(0); p.x(1)
    for step in range(2):
        for a, b in [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]:
            p.zz(0.21 + 0.05 * step, a, b)
        for q in range(4):
            p.h(q)
        for a, b in [(0, 1), (2, 3)]:
            p.zz(0.13, a, b)
        for q in range(4):
            p.h(q)
            p.rz(0.3 * (q + 1), q)
    return p


def cat_state_n4():
    p = Prog(4)
    p.h(0)
    for q in range(3):
        p.cx(q, q + 1)
    return p


def deutsch_n2():
    p = Prog(2)
    p.x(1); p.h(0); p.h(1); p.cx(0, 1); p.h(0)
    return p


def dnn(n, layers):
    p = Prog(n)
    for layer in range(layers):
        for q in range(n):
            p.ry(0.3 + 0.17 * q + 0.41 * layer, q)
            p.rz(0.2 * (layer + 1) - 0.05 * q, q)
        for q in range(0, n - 1, 2):
            p.cx(q, q + 1)
        for q in range(1, n - 1, 2):
            p.cx(q, q + 1)
    return p


def error_correctiond3_n5():
    p = Prog(5)
    p.ry(0.7, 0)
    p.cx(0, 1); p.cx(0, 2)
    p.x(1)  # injected bit flip
    p.cx(0, 3); p.cx(1, 3)
    p.cx(1, 4); p.cx(2, 4)
    return p


def fredkin_n3():
    p = Prog(3)
    p.x(0); p.x(1)
    p.cx(2, 1); p.ccx(0, 1, 2); p.cx(2, 1)
    return p


def grover_n2():
    p = Prog(2)
    p.h(0); p.h(1)
    p.cz(0, 1)
    p.h(0); p.h(1); p.x(0); p.x(1)
    p.cz(0, 1)
    p.x(0); p.x(1); p.h(0); p.h(1)
    return p


def hhl_n7():
    # Clock register 1..4, system 0, ancilla 5, work 6.
    p = Prog(7)
    p.x(0)
    for q in range(1, 5):
        p.h(q)
    for i, q in enumerate(range(1, 5)):
        p.cu1(PI * 0.75 * 2 ** i / 4, q, 0)
    qft(p, [1, 2, 3, 4], inverse=True)
    for i, q in enumerate(range(1, 5)):
        p.cry(PI / 2 ** (i + 1), q, 5)
    p.cx(5, 6)
    qft(p, [1, 2, 3, 4])
    for i, q in reversed(list(enumerate(range(1, 5)))):
        p.cu1(-PI * 0.75 * 2 ** i / 4, q, 0)
    for q in range(1, 5):
        p.h(q)
    return p


def hs4_n4():
    p = Prog(4)
    for q in range(4):
        p.h(q)
    p.z(0); p.z(2)
    p.cz(0, 1); p.cz(2, 3)
    for q in range(4):
        p.h(q)
    p.z(1); p.z(3)
    p.cz(0, 1); p.cz(2, 3)
    for q in range(4):
        p.h(q)
    return p


def ising_n10():
    p = Prog(10)
    for q in range(10):
        p.h(q)
    for step in range(2):
        for q in range(0, 9, 2):
            p.zz(0.4, q, q + 1)
        for q in range(1, 9, 2):
            p.zz(0.4, q, q + 1)
        for q in range(10):
            p.rx(0.35 + 0.1 * step, q)
    return p


def iswap_n2():
    p = Prog(2)
    p.x(0)
    p.s(0); p.s(1); p.h(0)
    p.cx(0, 1); p.cx(1, 0)
    p.h(1)
    return p


def linearsolver_n3():
    p = Prog(3)
    p.ry(1.2, 0)
    p.h(1)
    p.cry(0.9, 1, 0)
    p.cx(0, 2)
    p.cry(-0.5, 2, 1)
    p.h(1)
    p.rz(0.3, 2)
    return p


def lpn_n5():
    p = Prog(5)
    for q in range(4):
        p.h(q)
    for q in (0, 2, 3):
        p.cx(q, 4)
    p.x(4)
    for q in range(4):
        p.h(q)
    return p


def pea_n5():
    p = Prog(5)
    p.x(4)
    for q in range(4):
        p.h(q)
    phase = 2 * PI * 0.3125
    for i in range(4):
        p.cu1(phase * 2 ** i, i, 4)
    qft(p, [3, 2, 1, 0], inverse=True)
    return p


def qaoa_n6():
    p = Prog(6)
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]
    for q in range(6):
        p.h(q)
    for gamma, beta in [(0.8, 0.4)]:
        for a, b in edges:
            p.zz(2 * gamma, a, b)
        for q in range(6):
            p.rx(2 * beta, q)
    return p


def qec_en_n5():
    p = Prog(5)
    p.ry(1.0, 0)
    p.h(1); p.h(2)
    p.cx(0, 3); p.cx(1, 3); p.cx(2, 4); p.cx(0, 4)
    p.cx(1, 0); p.cx(2, 3)
    p.h(1)
    return p


def qft_n4():
    p = Prog(4)
    p.x(0); p.x(2)
    qft(p, [0, 1, 2, 3])
    p.swap(0, 3); p.swap(1, 2)
    return p


def qpe_n9():
    p = Prog(9)
    p.x(8)
    for q in range(8):
        p.h(q)
    phase = 2 * PI * (45 / 256)
    for i in range(8):
        p.cu1(phase * 2 ** i, i, 8)
    qft(p, list(reversed(range(8))), inverse=True)
    return p


def qrng_n4():
    p = Prog(4)
    for q in range(4):
        p.h(q)
    return p


def quantumwalks_n2():
    p = Prog(2)
    for _ in range(3):
        p.h(1)
        p.cx(1, 0)
        p.x(1)
        p.cx(1, 0)
        p.x(1)
        p.ry(0.6, 0)
    return p


def shor_n5():
    # Order finding for a = 11 mod 15 with a 3-bit counting register.
    p = Prog(5)
    for q in range(3):
        p.h(q)
    p.x(3)
    p.cx(0, 4); p.cx(0, 3)
    qft(p, [2, 1, 0], inverse=True)
    return p


def simon_n6():
    p = Prog(6)
    for q in range(3):
        p.h(q)
    for q in range(3):
        p.cx(q, q + 3)
    p.cx(0, 4); p.cx(0, 5)
    for q in range(3):
        p.h(q)
    return p


def teleportation_n3():
    p = Prog(3)
    p.u1(0.0, 0)
    p.ry(0.9, 0); p.rz(0.4, 0)
    p.h(1); p.cx(1, 2)
    p.cx(0, 1); p.h(0)
    p.cx(1, 2)
    p.cz(0, 2)
    return p


def toffoli_n3():
    p = Prog(3)
    p.x(0); p.x(1)
    p.ccx(0, 1, 2)
    return p


def variational_n4():
    p = Prog(4)
    p.x(0); p.x(2)
    for layer in range(2):
        for a, b in [(0, 1), (2, 3), (1, 2)]:
            p.zz(0.25 + 0.1 * layer, a, b)
            p.swap(a, b)
        for q in range(4):
            p.ry(0.15 * (q + 1), q)
    return p


def wstate_n3():
    p = Prog(3)
    p.ry(2 * math.acos(1 / math.sqrt(3)), 0)
    p.x(0)
    p.cry(PI / 2, 0, 1)
    p.x(0)
    p.cx(1, 2)
    p.cx(0, 1)
    p.x(0)
    p.barrier(0, 1, 2)
    return p


SUITE = [
    ("adder_n10", adder_n10),
    ("adder_n4", adder_n4),
    ("basis_change_n3", basis_change_n3),
    ("basis_trotter_n4", basis_trotter_n4),
    ("cat_state_n4", cat_state_n4),
    ("deutsch_n2", deutsch_n2),
    ("dnn_n2", lambda: dnn(2, 3)),
    ("dnn_n8", lambda: dnn(8, 3)),
    ("error_correctiond3_n5", error_correctiond3_n5),
    ("fredkin_n3", fredkin_n3),
    ("grover_n2", grover_n2),
    ("hhl_n7", hhl_n7),
    ("hs4_n4", hs4_n4),
    ("ising_n10", ising_n10),
    ("iswap_n2", iswap_n2),
    ("linearsolver_n3", linearsolver_n3),
    ("lpn_n5", lpn_n5),
    ("pea_n5", pea_n5),
    ("qaoa_n6", qaoa_n6),
    ("qec_en_n5", qec_en_n5),
    ("qft_n4", qft_n4),
    ("qpe_n9", qpe_n9),
    ("qrng_n4", qrng_n4),
    ("quantumwalks_n2", quantumwalks_n2),
    ("shor_n5", shor_n5),
    ("simon_n6", simon_n6),
    ("teleportation_n3", teleportation_n3),
    ("toffoli_n3", toffoli_n3),
    ("variational_n4", variational_n4),
    ("wstate_n3", wstate_n3),
]


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "benchmarks"
    out.mkdir(exist_ok=True)
    for i, (name, build) in enumerate(SUITE, start=1):
        text = build().text()
        (out / f"{name}.qasm").write_text(text)
    (out / "suite.txt").write_text("".join(f"{name}\n" for name, _ in SUITE))
    print(f"wrote {len(SUITE)} programs")


if __name__ == "__main__":
    main()
