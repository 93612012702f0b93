#!/usr/bin/env python3
"""
Example usage of the NUFFT library

This script shows how to plan and run transforms programmatically and how to
look at their error.
"""

import numpy as np

from aliasing import eps_inf_estimate, es_rate
from nufft import NuPoints, direct_type1, make_plan, type1, type2
from pswf import pswf_eval, pswf_solve
from kernels import KernelFamily, KernelSpec, kernel_eval

def example_usage():
    """Run a type 1 and a type 2 transform and compare with the direct sums."""

    rng = np.random.default_rng(42)
    N, M = 256, 2000
    x = rng.uniform(-np.pi, np.pi, M)
    c = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    pts = NuPoints(x)

    print("Planning a transform for tolerance 1e-9...")
    plan = make_plan(N, tol=1e-9)
    print(f"  {plan.summary()}")

    f = type1(plan, pts, c)
    exact = direct_type1(pts, c, N)
    err = np.max(np.abs(f - exact)) / np.sum(np.abs(c))
    print(f"Type 1 relative error: {err:.3e}")

    # type 2 is the adjoint of type 1
    g = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    lhs = np.vdot(g, type1(plan, pts, c))
    rhs = np.vdot(type2(plan, pts, g), c)
    print(f"Adjoint mismatch: {abs(lhs - rhs) / abs(lhs):.3e}")

def example_error_rate():
    """Show how eps_inf falls with the kernel width."""

    print("w   eps_inf     exp(-rate w)")
    for w in range(4, 13, 2):
        plan = make_plan(128, w=w)
        report = eps_inf_estimate(plan)
        print(f"{w:<3d} {report.eps_inf_est:.3e}   {np.exp(-es_rate(2.0, 0.98) * w):.3e}")

def example_kernels():
    """Compare the ES and KB kernels with psi0 at beta = 30."""

    beta = 30.0
    z = np.linspace(-1, 1, 9)
    psi = pswf_eval(pswf_solve(beta), z, normalize_center=True)
    es = kernel_eval(KernelSpec(KernelFamily.ES, beta), z)
    kb = kernel_eval(KernelSpec(KernelFamily.KB, beta), z)
    print("z       psi0        es          kb")
    for row in zip(z, psi, es, kb):
        print("{:+.2f}   {:.3e}   {:.3e}   {:.3e}".format(*row))

if __name__ == "__main__":
    print("=== NUFFT Example Usage ===\n")

    example_usage()

    print("\n" + "="*50 + "\n")

    example_error_rate()

    print("\n" + "="*50 + "\n")

    example_kernels()

    print("\nExample complete!")
    print("\nTo run transforms on your own data:")
    print("1. Write points to x.csv (header x) and strengths to c.csv (header re,im)")
    print("2. Use: python main.py transform type1 --points x.csv --data c.csv --modes 256")
    print("3. Use: python main.py checks --suite all")
