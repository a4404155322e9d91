"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them on success) and enforcing its
stated tolerance and runtime budget."""

import os
import time
import warnings

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from kppca import (
    KernelSpec,
    SymMatrix,
    TrainingSet,
    build_sampler,
    center_columns,
    center_gram,
    dual_latent_map,
    dual_reconstruct,
    dual_sample,
    explained_variance,
    fit_dual,
    fit_primal,
    gram,
    kernel_sample,
    kpca_limit,
    latent_map,
    load_mnist_idx,
    marginal_loglik,
    sigma2_ml,
    sym_eig,
    two_arcs,
)
from kppca.cli import main as cli_main
from kppca.io_datasets import save_csv

from conftest import align_columns, kpca_oracle_reconstruct, toy_dual_model


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance {num}] {name}: {status}{suffix}")
    assert ok, f"criterion {num} ({name}) failed{suffix}"


def linear_instances(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(4, 13))
        q = int(rng.integers(1, min(d, n - 1) + 1))
        x = rng.standard_normal((d, n))
        yield rng, d, n, q, x


def fitted_pair(x, q):
    spec = KernelSpec("linear")
    ts = TrainingSet.from_columns(x)
    kc = center_gram(gram(spec, ts))
    return fit_primal(x, q=q), fit_dual(kc, spec, ts, q=q)


def test_criterion_1_weight_identity():
    start = time.perf_counter()
    worst = 0.0
    for rng, d, n, q, x in linear_instances(1001, 50):
        pm, dm = fitted_pair(x, q)
        xc, _ = center_columns(x)
        w_dual, _ = align_columns(pm.w, xc @ dm.a)
        worst = max(worst, float(np.abs(pm.w - w_dual).max()))
    elapsed = time.perf_counter() - start
    report(1, "primal-dual weight identity", worst <= 1e-10 and elapsed < 5.0,
           f"max|W - Phi_c A| = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_map_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for rng, d, n, q, x in linear_instances(1001, 50):
        pm, dm = fitted_pair(x, q)
        xc, _ = center_columns(x)
        _, signs = align_columns(pm.w, xc @ dm.a)
        probes = [x[:, i] for i in range(n)] + [rng.standard_normal(d) for _ in range(10)]
        for p in probes:
            h_primal = latent_map(pm, p)
            h_dual = signs * dual_latent_map(dm, kernel_sample(dm, p))
            worst = max(worst, float(np.abs(h_primal - h_dual).max()))
    elapsed = time.perf_counter() - start
    report(2, "primal-dual MAP equivalence", worst <= 1e-8 and elapsed < 5.0,
           f"max component diff = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_spectrum_transport():
    start = time.perf_counter()
    worst_lam, worst_vec = 0.0, 0.0
    rng = np.random.default_rng(33)
    for _ in range(25):
        d = int(rng.integers(2, 7))
        n = int(rng.integers(4, 13))
        xc, _ = center_columns(rng.standard_normal((d, n)))
        cov_eig = sym_eig(SymMatrix(xc @ xc.T))
        gram_eig = sym_eig(SymMatrix(xc.T @ xc))
        m = min(d, n)
        for p in range(m):
            lam = gram_eig.eigenvalues[p]
            if lam <= 1e-8:
                continue
            rel = abs(cov_eig.eigenvalues[p] - lam) / lam
            worst_lam = max(worst_lam, rel)
            v = cov_eig.eigenvectors[:, p]
            t = xc @ gram_eig.eigenvectors[:, p] / np.sqrt(lam)
            if t @ v < 0:
                t = -t
            worst_vec = max(worst_vec, float(np.linalg.norm(v - t)))
    elapsed = time.perf_counter() - start
    report(3, "shared spectrum and eigenvector transport",
           worst_lam <= 1e-8 and worst_vec <= 1e-6 and elapsed < 2.0,
           f"rel spectrum diff = {worst_lam:.2e}, transport diff = {worst_vec:.2e}, {elapsed:.2f}s")


def test_criterion_4_noise_estimator():
    start = time.perf_counter()
    ok = sigma2_ml([4.0, 2.0, 1.0, 1.0], q=2, n=4) == 0.25
    rng = np.random.default_rng(44)
    for _ in range(200):
        n = int(rng.integers(2, 15))
        q = int(rng.integers(1, n))
        lam = np.sort(rng.uniform(0.0, 50.0, n))[::-1]
        ok = ok and sigma2_ml(lam, q, n) <= lam[q - 1] / n
    elapsed = time.perf_counter() - start
    report(4, "ML constraint and noise formula", ok and elapsed < 1.0, f"{elapsed:.2f}s")


def test_criterion_5_kpca_limit():
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(55)
    for i in range(20):
        n = int(rng.integers(5, 13))
        d_in = int(rng.integers(2, 5))
        spec = KernelSpec("linear") if i % 2 else KernelSpec("rbf", float(rng.uniform(0.8, 3.0)))
        ts = TrainingSet(rng.standard_normal((n, d_in)))
        kc = center_gram(gram(spec, ts))
        rank = sym_eig(kc).rank()
        q = int(rng.integers(1, rank + 1))
        model = kpca_limit(fit_dual(kc, spec, ts, q=q))
        probes = [kc.entries[:, j] for j in range(n)]
        probes += [kernel_sample(model, rng.standard_normal(d_in)).kc_vec for _ in range(5)]
        for kvec in probes:
            ours = dual_reconstruct(model, dual_latent_map(model, kvec)).kc_vec
            oracle = kpca_oracle_reconstruct(kc.entries, q, kvec)
            worst = max(worst, float(np.abs(ours - oracle).max()))
    elapsed = time.perf_counter() - start
    report(5, "noiseless pipeline equals classical KPCA", worst <= 1e-10 and elapsed < 5.0,
           f"max diff = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_6_identity_limit():
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(66)
    for i in range(20):
        n = int(rng.integers(4, 11))
        spec = KernelSpec("linear") if i % 2 else KernelSpec("rbf", 1.5)
        ts = TrainingSet(rng.standard_normal((n, 2)))
        kc = center_gram(gram(spec, ts))
        model = fit_dual(kc, spec, ts, sigma2=0.0)  # q resolves to the full rank
        probes = [kc.entries[:, j] for j in range(n)]
        probes += [kernel_sample(model, rng.standard_normal(2)).kc_vec for _ in range(3)]
        for kvec in probes:
            rec = dual_reconstruct(model, dual_latent_map(model, kvec)).kc_vec
            worst = max(worst, float(np.abs(rec - kvec).max()))
    elapsed = time.perf_counter() - start
    report(6, "noiseless full-rank reduction is the identity", worst <= 1e-8 and elapsed < 2.0,
           f"max |k_map - k| = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_7_sampler_law():
    start = time.perf_counter()
    model = toy_dual_model(n=8, q=3, sigma2=0.05, seed=77)
    b = build_sampler(model)
    symmetric = float(np.abs(b - b.T).max()) <= 1e-10
    full_rank = np.linalg.matrix_rank(b) == 8
    mat = np.stack([s.kc_vec for s in dual_sample(model, 2718, 200_000)], axis=1)
    emp = mat @ mat.T / mat.shape[1]
    target = b @ b.T
    rel = float(np.linalg.norm(emp - target) / np.linalg.norm(target))
    elapsed = time.perf_counter() - start
    report(7, "sampling operator law", symmetric and full_rank and rel <= 0.05 and elapsed < 30.0,
           f"rel Frobenius = {rel:.4f}, symmetric = {symmetric}, full rank = {full_rank}, {elapsed:.2f}s")


def test_criterion_8_loglik_oracle():
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(88)
    checked = 0
    while checked < 20:
        d = int(rng.integers(1, 5))
        n = int(rng.integers(3, 9))
        q = int(rng.integers(1, min(d, n) + 1))
        x = rng.standard_normal((d, n))
        m = fit_primal(x, q=q)
        if m.sigma2 <= 1e-10:
            continue
        cov = m.w @ m.w.T + m.sigma2 * np.eye(d)
        oracle = multivariate_normal(mean=m.mu, cov=cov).logpdf(x.T).sum()
        worst = max(worst, abs(marginal_loglik(m, x) - oracle))
        checked += 1
    elapsed = time.perf_counter() - start
    report(8, "marginal log-likelihood vs dense oracle", worst <= 1e-8 and elapsed < 2.0,
           f"max diff = {worst:.2e}, {elapsed:.2f}s")


def test_criterion_9a_toy_trends():
    start = time.perf_counter()
    x = two_arcs(20, seed=0)
    spec = KernelSpec("rbf", 2.0)
    ts = TrainingSet.from_columns(x)
    kc = center_gram(gram(spec, ts))
    rank = sym_eig(kc).rank()
    evs, s2s = [], []
    for q in range(1, rank + 1):
        m = fit_dual(kc, spec, ts, q=q)
        evs.append(explained_variance(m))
        s2s.append(m.sigma2)
    strictly_up = all(b > a for a, b in zip(evs, evs[1:]))
    strictly_down = all(b < a for a, b in zip(s2s, s2s[1:]))
    vanishes = s2s[-1] == 0.0  # the discarded spectrum is empty at full rank
    elapsed = time.perf_counter() - start
    report("9a", "toy trends: variance up, noise down to zero",
           strictly_up and strictly_down and vanishes and elapsed < 10.0,
           f"ev {evs[0]:.3f}->{evs[-1]:.3f}, sigma2 {s2s[0]:.2e}->{s2s[-1]:.1e}, {elapsed:.2f}s")


def _find_mnist():
    roots = []
    if os.environ.get("KPPCA_MNIST_DIR"):
        roots.append(os.environ["KPPCA_MNIST_DIR"])
    roots.append(os.path.join(os.path.dirname(__file__), "..", "data", "mnist"))
    image_names = ["train-images-idx3-ubyte", "train-images.idx3-ubyte"]
    label_names = ["train-labels-idx1-ubyte", "train-labels.idx1-ubyte"]
    for root in roots:
        for img in image_names:
            for lab in label_names:
                for suffix in ("", ".gz"):
                    ipath = os.path.join(root, img + suffix)
                    lpath = os.path.join(root, lab + suffix)
                    if os.path.exists(ipath) and os.path.exists(lpath):
                        return ipath, lpath
    return None


def _mnist_band_check(images_path, labels_path):
    """Digits {0, 1}, first 500 samples, RBF gamma 4, q = 2; returns the
    explained variance, elapsed seconds, and whether the reference band
    0.2797 +/- 0.05 holds."""
    start = time.perf_counter()
    x, _ = load_mnist_idx(images_path, labels_path, label_filter={0, 1}, limit=500)
    spec = KernelSpec("rbf", 4.0)
    ts = TrainingSet.from_columns(x)
    kc = center_gram(gram(spec, ts))
    m = fit_dual(kc, spec, ts, q=2)
    ev = explained_variance(m)
    elapsed = time.perf_counter() - start
    return ev, elapsed, abs(ev - 0.2797) <= 0.05


def test_criterion_9b_mnist_soft_check():
    found = _find_mnist()
    if found is None:
        msg = ("MNIST IDX files not found (set KPPCA_MNIST_DIR or place them under "
               "data/mnist); soft check skipped")
        print(f"[acceptance 9b] MNIST explained-variance band: SKIP ({msg})")
        warnings.warn(msg)
        pytest.skip(msg)
    ev, elapsed, in_band = _mnist_band_check(*found)
    detail = f"explained variance = {ev:.4f}, band 0.2797 +/- 0.05, {elapsed:.2f}s"
    assert elapsed < 60.0, detail
    if not in_band:
        # subset selection of the reference value is ambiguous: out-of-band
        # results downgrade to a warning rather than a failure
        print(f"[acceptance 9b] MNIST explained-variance band: WARN ({detail})")
        warnings.warn(f"explained variance outside the reference band: {detail}")
    else:
        print(f"[acceptance 9b] MNIST explained-variance band: PASS ({detail})")


def test_criterion_9b_machinery_on_synthetic_idx(tmp_path):
    # keeps the 9b pipeline exercised even when the real files are absent;
    # synthetic noise sits far outside the reference band by construction
    import struct

    rng = np.random.default_rng(99)
    count = 40
    images = rng.integers(0, 256, size=(count, 28, 28), dtype=np.uint8)
    labels = rng.integers(0, 3, size=count, dtype=np.uint8)
    img = tmp_path / "train-images-idx3-ubyte"
    lab = tmp_path / "train-labels-idx1-ubyte"
    img.write_bytes(struct.pack(">IIII", 2051, count, 28, 28) + images.tobytes())
    lab.write_bytes(struct.pack(">II", 2049, count) + labels.tobytes())
    ev, elapsed, in_band = _mnist_band_check(str(img), str(lab))
    assert 0.0 < ev <= 1.0
    assert elapsed < 60.0


def test_criterion_10_cli_determinism(tmp_path):
    start = time.perf_counter()
    data = tmp_path / "data.csv"
    save_csv(data, two_arcs(20, seed=0), header=["x1", "x2"])
    outputs = {}
    for tag in ("a", "b"):
        model_out = tmp_path / tag / "model"
        assert cli_main(["fit", "--data", str(data), "--kernel", "rbf", "--gamma", "2",
                         "--q", "3", "--out", str(model_out)]) == 0
        gen_out = tmp_path / tag / "gen"
        assert cli_main(["generate", "--model", str(model_out / "model.kppca"),
                         "--count", "30", "--seed", "11", "--out", str(gen_out)]) == 0
        proj_out = tmp_path / tag / "proj"
        assert cli_main(["project", "--model", str(model_out / "model.kppca"),
                         "--data", str(data), "--out", str(proj_out)]) == 0
        rec_out = tmp_path / tag / "rec"
        assert cli_main(["reconstruct", "--model", str(model_out / "model.kppca"),
                         "--data", str(data), "--out", str(rec_out)]) == 0
        outputs[tag] = [
            model_out / "model.kppca",
            gen_out / "kernel_samples.csv",
            gen_out / "generated.csv",
            gen_out / "scatter.svg",
            proj_out / "latent.csv",
            rec_out / "reconstructed.csv",
        ]
    identical = all(a.read_bytes() == b.read_bytes() for a, b in zip(outputs["a"], outputs["b"]))
    elapsed = time.perf_counter() - start
    report(10, "CLI determinism", identical and elapsed < 5.0,
           f"{len(outputs['a'])} artifacts byte-compared, {elapsed:.2f}s")
