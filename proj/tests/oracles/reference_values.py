"""Independent reference values frozen into the C++ test suites.

Nothing here shares code with the library. Run with:  python3 reference_values.py
"""
import math

import mpmath as mp
from scipy import integrate, optimize, special

mp.mp.dps = 40

PI_100 = ("11001001000011111101101010100010001000010110100011"
          "00001000110100110001001100011001100010100010111000")
LONGEST_128 = ("11001100000101010110110001001100111000000000001001"
               "00110101010001000100111101011010000000110101111100"
               "1100111001101101100010110010")


def igamc(a, x):
    return mp.gammainc(a, x, mp.inf, regularized=True)


def monobit(bits):
    s = sum(1 if b == "1" else -1 for b in bits)
    return mp.erfc(abs(s) / mp.sqrt(2 * len(bits)))


def block_frequency(bits, m):
    n = len(bits) // m
    chi = 4 * m * sum((mp.mpf(bits[i * m:(i + 1) * m].count("1")) / m - mp.mpf(1) / 2) ** 2
                      for i in range(n))
    return igamc(mp.mpf(n) / 2, chi / 2)


def runs(bits):
    n = len(bits)
    pi = mp.mpf(bits.count("1")) / n
    v = 1 + sum(1 for i in range(n - 1) if bits[i] != bits[i + 1])
    return mp.erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * mp.sqrt(2 * n) * pi * (1 - pi)))


def longest_run_m8(bits):
    # exact class probabilities for 8-bit blocks: 55/256, 94/256, 59/256, 48/256
    pis = [mp.mpf(55) / 256, mp.mpf(94) / 256, mp.mpf(59) / 256, mp.mpf(48) / 256]
    nu = [0, 0, 0, 0]
    for i in range(len(bits) // 8):
        blk = bits[i * 8:(i + 1) * 8]
        r = max(len(x) for x in blk.split("0"))
        nu[min(max(r, 1), 4) - 1] += 1
    n = len(bits) // 8
    chi = sum((nu[i] - n * pis[i]) ** 2 / (n * pis[i]) for i in range(4))
    return nu, chi, igamc(mp.mpf(3) / 2, chi / 2)


def cusum(bits, forward=True):
    x = [1 if b == "1" else -1 for b in bits]
    if not forward:
        x = x[::-1]
    s, z = 0, 0
    for v in x:
        s += v
        z = max(z, abs(s))
    n = len(bits)
    phi = lambda t: mp.ncdf(t)
    sq = mp.sqrt(n)
    # summation limits truncate toward zero, as in the suite's reference code
    t1 = sum(phi((4 * k + 1) * z / sq) - phi((4 * k - 1) * z / sq)
             for k in range(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1))
    t2 = sum(phi((4 * k + 3) * z / sq) - phi((4 * k + 1) * z / sq)
             for k in range(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1))
    return 1 - t1 + t2


def psi_sq(bits, m):
    if m <= 0:
        return mp.mpf(0)
    n = len(bits)
    ext = bits + bits[:m - 1]
    counts = {}
    for i in range(n):
        counts[ext[i:i + m]] = counts.get(ext[i:i + m], 0) + 1
    return mp.mpf(2) ** m / n * sum(c * c for c in counts.values()) - n


def serial(bits, m):
    p0, p1, p2 = psi_sq(bits, m), psi_sq(bits, m - 1), psi_sq(bits, m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    return igamc(mp.mpf(2) ** (m - 2), d1 / 2), igamc(mp.mpf(2) ** (m - 3), d2 / 2)


def phi_apen(bits, m):
    n = len(bits)
    if m == 0:
        return mp.mpf(0)
    ext = bits + bits[:m - 1]
    counts = {}
    for i in range(n):
        counts[ext[i:i + m]] = counts.get(ext[i:i + m], 0) + 1
    return sum(mp.mpf(c) / n * mp.log(mp.mpf(c) / n) for c in counts.values())


def apen(bits, m):
    n = len(bits)
    ap = phi_apen(bits, m) - phi_apen(bits, m + 1)
    chi = 2 * n * (mp.log(2) - ap)
    return igamc(mp.mpf(2) ** (m - 1), chi / 2)


def section(title):
    print("\n# " + title)


section("NIST worked examples")
print("monobit 1011010101", mp.nstr(monobit("1011010101"), 15))
print("monobit 1001101011", mp.nstr(monobit("1001101011"), 15))
print("monobit pi100", mp.nstr(monobit(PI_100), 15))
print("block_frequency 0110011010 M=3", mp.nstr(block_frequency("0110011010", 3), 15))
print("block_frequency pi100 M=10", mp.nstr(block_frequency(PI_100, 10), 15))
print("runs 1001101011", mp.nstr(runs("1001101011"), 15))
print("runs pi100", mp.nstr(runs(PI_100), 15))
nu, chi, p = longest_run_m8(LONGEST_128)
print("longest 128", nu, mp.nstr(chi, 10), mp.nstr(p, 15))
print("cusum 1011010111 fwd", mp.nstr(cusum("1011010111"), 15))
print("cusum pi100 fwd", mp.nstr(cusum(PI_100), 15), "rev", mp.nstr(cusum(PI_100, False), 15))
print("apen 0100110101 m=3", mp.nstr(apen("0100110101", 3), 15))
print("apen pi100 m=2", mp.nstr(apen(PI_100, 2), 15))
print("serial 0011011101 m=3", [mp.nstr(v, 15) for v in serial("0011011101", 3)])
print("serial pi100 m=2", [mp.nstr(v, 15) for v in serial(PI_100, 2)])

section("erfc reference points")
for x in [0.0, 1e-8, 0.001, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0,
          -0.5, -1.5, 7.5, 10.0]:
    print("{ %r, %s }," % (x, mp.nstr(mp.erfc(x), 20)))

section("igamc reference points (a, x, Q)")
for a, x in [(0.5, 0.1), (0.5, 1.0), (0.5, 5.0), (1.0, 0.5), (1.0, 3.0), (1.5, 0.7), (1.5, 4.0),
             (2.0, 0.8), (2.0, 10.0), (3.0, 2.5), (4.5, 3.0), (5.0, 12.0), (8.0, 8.0),
             (16.0, 10.0), (32.0, 40.0), (64.0, 60.0), (128.0, 150.0), (0.25, 0.05),
             (10.0, 2.0), (512.0, 520.0)]:
    print("{ %r, %r, %s }," % (a, x, mp.nstr(igamc(a, x), 20)))

section("Beam-splitter physics")
mu = 2.0
print("pmf mu=2 (1,1)", mp.nstr(mp.e ** -2 * 4 / 4, 15))


def single_pgen(x):
    p = 1 - math.exp(-x / 2)
    return 2 * p * (1 - p)


def indist_pgen(x):
    # two phase-randomised WCS with total mean x; average over relative phase
    return 2 * math.exp(-x / 2) * special.iv(0, x / 2) - 2 * math.exp(-x)


def indist_pdisc(x):
    return 1 - 2 * math.exp(-x / 2) * special.iv(0, x / 2) + math.exp(-x)


r = optimize.minimize_scalar(lambda x: -indist_pgen(x), bounds=(0.5, 5), method="bounded",
                             options={"xatol": 1e-10})
print("indist optimum", r.x, indist_pgen(r.x))
print("single optimum", 2 * math.log(2), single_pgen(2 * math.log(2)))
print("ratio", indist_pgen(r.x) / 0.5)


def phase_avg_joint(M, N, x):
    f = lambda phi: (mp.exp(-x * (1 + mp.cos(phi)) / 2) * (x * (1 + mp.cos(phi)) / 2) ** M / mp.factorial(M)
                     * mp.exp(-x * (1 - mp.cos(phi)) / 2) * (x * (1 - mp.cos(phi)) / 2) ** N / mp.factorial(N))
    return mp.quad(f, [0, mp.pi]) / mp.pi


print("indist joint mu=1.7 (1,1)", mp.nstr(phase_avg_joint(1, 1, 1.7), 17),
      "check e^-mu mu^2/8", mp.nstr(mp.e ** -1.7 * 1.7 ** 2 / 8, 17))
for (M, N) in [(2, 0), (2, 1), (3, 1), (2, 2), (4, 0)]:
    print("indist joint mu=1.7", (M, N), mp.nstr(phase_avg_joint(M, N, 1.7), 17))


def contrast(x):
    sd = (1 - math.exp(-x / 2)) ** 2
    return 1 - indist_pdisc(x) / sd


for x in [0.01, 0.1, 1, 5, 20]:
    print("contrast", x, contrast(x))
for x in [0.5, 1.4, 2.1, 5]:
    print("pgen/pdisc", x, "single", single_pgen(x), (1 - math.exp(-x / 2)) ** 2,
          "indist", indist_pgen(x), indist_pdisc(x))

section("Poisson truncation bound, tail 1e-3")
for x in [0.0005, 0.001, 0.01, 1.0, 2.1, 5.0, 20.0]:
    k = 0
    while special.pdtr(k, x) < 1 - 1e-3:
        k += 1
    print("bound", x, k)


def longest_run_classes(M, low, K):
    """Exact class probabilities by counting strings whose longest run of ones is bounded."""
    from fractions import Fraction

    def count(n, r):
        st = [0] * (r + 1)
        st[0] = 1
        for _ in range(n):
            nx = [0] * (r + 1)
            for j, c in enumerate(st):
                nx[0] += c
                if j + 1 <= r:
                    nx[j + 1] += c
            st = nx
        return sum(st)

    prev = Fraction(0)
    out = []
    for i in range(K - 1):
        c = Fraction(count(M, low + i), 2 ** M)
        out.append(c - prev)
        prev = c
    out.append(1 - prev)
    return [float(x) for x in out]


if __name__ == "__main__":
    print("longest-run classes M=128:", longest_run_classes(128, 4, 6))
    print("longest-run classes M=10000:", longest_run_classes(10000, 10, 7))
