import math

import numpy as np
import pytest

import cloaksim as cs


def test_linewidth_algebra():
    assert cs.linewidth_from_lifetime(1.4e-9) == pytest.approx(113.68e6, rel=1e-4)
    assert cs.total_fwhm(2 * math.pi * 114e6, 2 * math.pi * 87e6) == pytest.approx(288e6)
    assert cs.dip_from_zeta(cs.zeta_from_dip(0.04)) == pytest.approx(0.04, abs=1e-12)


def test_g2_antibunching():
    e = cs.EmitterParams.from_lifetime(1.4e-9, 87e6)
    tau = np.linspace(0.0, 10e-9, 101)
    g = cs.g2(tau, 2 * math.pi * 300e6, e)
    assert isinstance(g, np.ndarray)
    assert abs(g[0]) < 1e-12
    assert g[-1] == pytest.approx(1.0, abs=1e-3)


def test_transparency_design_and_fit():
    focus = cs.make_focus(740.0, 270.0)
    model = cs.design_transparency_model(cs.TransparencyObservables(), 40e12, focus)
    grid = np.linspace(404.96e12 - 1.5e9, 404.96e12 + 1.5e9, 301)
    assert cs.transmission_change(grid, model) == pytest.approx(0.10, abs=1e-3)
    assert cs.hybridized_emitter(model)["lamb_shift_hz"] == pytest.approx(12e6, rel=1e-3)

    z = cs.axial_positions(7, 3500.0)
    stack = cs.generate_zstack(grid, model, z)
    assert len(stack) == 7 and len(stack[0]) == 301
    fit, fitted = cs.fit_zstack(stack, model, z[1] - z[0])
    assert fit["converged"]
    assert fitted.coupling == pytest.approx(model.coupling, rel=1e-3)


def test_lorentzian_fit_and_errors():
    nu = np.linspace(-1e9, 1e9, 201)
    y = 5.0 + 40.0 / (1.0 + (2.0 * nu / 290e6) ** 2)
    fit = cs.fit_lorentzian(cs.Spectrum(nu, y, cs.SpectrumKind.fluorescence))
    assert fit["parameters"]["fwhm_hz"] == pytest.approx(290e6, rel=1e-6)
    with pytest.raises(cs.DomainError):
        cs.Spectrum(nu[::-1], y)


def test_alignment_narrows_average():
    aligned, naive = cs.simulate_scans(290e6, 290e6, seed=3)
    w_aligned = cs.fit_lorentzian(aligned, True)["parameters"]["fwhm_hz"]
    w_naive = cs.fit_lorentzian(naive, True)["parameters"]["fwhm_hz"]
    assert w_aligned < 1.1 * 290e6 < w_naive


def test_localization():
    sigma = cs.psf_sigma_nm(270.0)
    assert cs.photons_for_precision(sigma, 10.0) == pytest.approx(131.5, abs=0.1)
    loc = cs.localize(520.0, 480.0, 5000.0, 1.0, seed=2)
    assert abs(loc["x_nm"] - 520.0) < 10.0
    assert loc["precision_nm"] == pytest.approx(cs.localization_precision(sigma, 5000.0), rel=0.3)


def test_cli_entry_point():
    code, out, err = cs.run(["--help"])
    assert code == 0 and "zstack" in out
    code, _, err = cs.run(["spectrum", "--config", "/nonexistent.json", "--out", "/tmp/x"])
    assert code != 0 and err
    assert '"seed"' in cs.config_json()
