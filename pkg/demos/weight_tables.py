"""
Exact weight tables
===================

The three graph families and the two routes to each wheel weight.
"""

from fractions import Fraction

from kontsevich_weights import WeightQuery, binomial_sum, weight, weight_gamma, weight_gamma_bruteforce

# closed forms for n = 0..9
for family in ("gamma", "upsilon", "lambda"):
    row = [weight(WeightQuery(family, n)).value for n in range(10)]
    print(f"{family:8s}", "  ".join(str(v) for v in row))

# the wheel weights also come out of the moment sums, pi powers cancelling
for n in range(6):
    assert weight_gamma(n) == weight_gamma_bruteforce(n)
print("closed form and moment sums agree for n < 6")

# odd upsilon and even gamma weights vanish
print("gamma_40 =", weight_gamma(40), " upsilon_41 =", weight(WeightQuery("upsilon", 41)).value)

# the one-boundary sums behind upsilon
for n in range(5):
    a, b, c = (binomial_sum(w, n, "brute_force") for w in "ABC")
    print(n, a, b, c, c == a + Fraction(1, 2 ** (n + 1) * (n + 1)))
