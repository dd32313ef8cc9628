"""Parallel transport on a two-variable family and Coleman integrals in a disk."""

from padicfam import transport
from padicfam.padic import TruncSeries, format_padic

p, N = 5, 8
L = transport.demo_family(10)
print("flat:", transport.flatness_check(L).flat)
res = transport.parallel_transport(L)
print("H[1][0] =", res.entry(1, 0))

G = transport.transport_evaluate(res, [0, 0], [5, 10], p, N)
print("transport 0 -> (5, 10):", G.to_record()["rows"])

t = TruncSeries.variable(0, ("t",), 14)
(val,) = transport.coleman_disk_integral([(1 + t).inverse()], [0], [p], p, N)
print("integral of dt/(1+t) from 0 to 5:", format_padic(val))
print("log(6) reduced mod 5^3:", val.reduce(3).value)

print("Betti square residual zero:", transport.betti_square_check(L).ok)
