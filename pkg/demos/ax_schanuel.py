"""Verdicts of the kernel analysis on the four built-in charts."""

from padicfam import axschanuel as axs

for name in ("parabola", "constant-kernel", "full-rank", "line-kernel"):
    omega, V = axs.demo(name, 12)
    loc = axs.effective_locus(omega, V)
    steps = ", ".join(type(v).__name__ for v in loc.verdicts)
    funcs = ", ".join(repr(f) for f in loc.functions) or "none"
    print(f"{name:<16} {steps:<40} functions: {funcs}")
    print(f"{'':<16} {'; '.join(loc.notes)}")
