"""Exercise each binding once and check the headline numbers."""

import math

import tweezerforge as tf


def main():
    state = tf.ArrayState.from_text("12.\n.21\n2.1\n")
    target = tf.TargetPattern.from_text("12.\n21.\n...\n")
    plan = tf.plan_rearrangement(state, target)
    assert plan.predicted.satisfies(target)
    print(f"plan: {plan.n_moves} moves in {plan.n_batches} batches")

    est = tf.success_probability(trials=2000, seed=1)
    assert 0.002 <= est["p_success"] <= 0.05, est
    print(f"parabolic success: {est['p_success']:.4f} +- {est['stderr']:.4f}")

    lines = tf.pa_spectrum()
    assert len(lines) == 7, lines
    print("PA levels (MHz):", ", ".join(f"{l['E_MHz']:.2f}" for l in lines))
    assert abs(tf.lb_density_ratio(30.0) - 30 ** (2 / 3)) < 1e-12

    model = tf.HistogramModel()
    best = model.optimize_threshold()
    counts = model.sample(50_000, 3)
    fitted, report = tf.fit_histogram(counts)
    print(f"threshold {best['threshold']:.2f}, fidelity {best['fidelity']:.5f}, refit {fitted.optimize_threshold()['fidelity']:.5f}")

    mf = tf.model_free_fidelity(tf.generate_triples(seed=2))
    print(f"model-free fidelity {mf['fidelity']:.5f}, survival {mf['survival_corrected']:.4f}")
    assert mf["survival_corrected_ci"]["lo"] <= 0.988 <= mf["survival_corrected_ci"]["hi"]

    pts = tf.contrast_curve("echo-399", [0.02, 0.2, 0.5, 0.8, 1.2], trajectories=1000, seed=4)
    t = [p["T_s"] for p in pts]
    c = [p["contrast"] for p in pts]
    fit = tf.fit_stretched_exp(t, c)
    print(f"echo-399: contrast at 20 ms {c[0]:.3f}, fitted T2 {fit['T2']:.3f} s")
    assert 0.96 <= c[0] <= 1.0

    mhz = tf.convert_energy(1.0, "hartree", "MHz")
    assert math.isclose(mhz, 6.579683920502e9, rel_tol=1e-9)
    print("smoke test passed")


if __name__ == "__main__":
    main()
