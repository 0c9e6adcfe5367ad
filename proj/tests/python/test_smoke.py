import math

import entperc


def check(cond, what):
    if not cond:
        raise AssertionError(what)


def main():
    rows = entperc.simulate("square", 64, "uniform", [math.pi / 2])
    check(rows == [{"t": math.pi / 2, "p_hat": 1.0, "P_hat": 1.0, "stderr_P": 0.0}], rows)

    s = entperc.solve_fixed_point(0.5, 0.5)
    check(s["converged"] and abs(s["S"] - 0.8541019662496845) < 1e-9, s)
    check(abs(entperc.jacobian_eigenvalue(0.2, 0.5) - 1.0) < 1e-12, "Lambda(0.2, 0.5)")
    check(abs(entperc.critical_line_phi2(0.2) - 0.5) < 1e-12, "critical line")
    check(abs(entperc.p_bernoulli(math.pi / 2, 0.5, 1.0, 2.0) - 0.5) < 1e-12, "p_bernoulli")
    check(abs(entperc.p_gaussian(20.0, 1.0, 0.3) - (1 - 2 / math.pi)) < 1e-8, "p_gaussian")
    check(abs(entperc.bernoulli_period(1.0, 2.5) - 2 * math.pi) < 1e-9, "period")
    check(entperc.bernoulli_period(1.0, math.pi) is None, "quasi-periodic")
    check(abs(entperc.eta(0.1, 1.0) - 0.5) < 0.05, "eta")

    grid = entperc.meanfield("grid", grid_step=0.5)
    check(len(grid) == 9 and grid[-1]["S"] == 1.0, grid)

    sweep = entperc.two_colour("sweep", L=16, n_samples=2, grid_step=0.5, threads=1)
    check(len(sweep) == 9, sweep)

    curve = entperc.analytic_p("bernoulli", [0.0, math.pi / 2], eta=0.5, omega1=1, omega2=2)
    check(abs(curve[1]["p"] - 0.5) < 1e-12, curve)

    check("fig5" in entperc.preset_names(), "presets")
    check(entperc.preset("fig2")["runs"][0]["L"] == 256, "fig2 preset")
    check(entperc.resolve({"subcommand": "meanfield"})["mode"] == "grid", "defaults")

    for bad in ({"subcommand": "simulate"}, {"subcommand": "meanfield", "bogus": 1}):
        try:
            entperc.execute(bad)
        except entperc.ConfigError:
            pass
        else:
            raise AssertionError("no ConfigError for %r" % bad)
    check(issubclass(entperc.ConfigError, ValueError), "ConfigError is a ValueError")

    try:
        entperc.meanfield("point", phi1=0.2, phi2=0.5)
    except entperc.ConvergenceError:
        pass
    else:
        raise AssertionError("no ConvergenceError at a critical point")

    try:
        entperc.simulate("square", 512, "uniform", [1.0, 2.0], budget=1000)
    except entperc.BudgetError:
        pass
    else:
        raise AssertionError("no BudgetError")
    print("python smoke tests passed")


if __name__ == "__main__":
    main()
