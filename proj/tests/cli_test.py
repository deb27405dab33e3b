"""End-to-end checks of the steer binary: interop, determinism, exit codes."""
import json
import os
import subprocess
import sys
import tempfile
import unittest
import zipfile

import numpy as np

STEER = None


def run(*args, env=None, check=True):
    full_env = dict(os.environ)
    full_env.pop("STEER_SEED", None)
    full_env["SOURCE_DATE_EPOCH"] = "1700000000"
    if env:
        full_env.update(env)
    proc = subprocess.run([STEER, *args], capture_output=True, text=True, env=full_env)
    if check and proc.returncode != 0:
        raise AssertionError(f"steer {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc


def read(path):
    with open(path, "rb") as f:
        return f.read()


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = cls.tmp.name
        cls.bundle = os.path.join(cls.dir, "m.zip")
        run("import", "--synthetic", "biggan128", "--out", cls.bundle)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def p(self, name):
        return os.path.join(self.dir, name)

    def assert_error(self, code, *args, env=None):
        proc = run(*args, env=env, check=False)
        self.assertEqual(proc.returncode, code, proc.stderr)
        lines = proc.stderr.strip().splitlines()
        self.assertEqual(len(lines), 1, proc.stderr)
        self.assertTrue(lines[0].startswith(f"E:{code}:"), lines[0])

    def test_container_readable_by_numpy(self):
        with zipfile.ZipFile(self.bundle) as z:
            names = z.namelist()
            meta = json.loads(z.read("meta.json"))
        self.assertEqual(names[0], "meta.json")
        self.assertEqual(meta["latent_dim"], 120)
        self.assertEqual(meta["dims"][0], [1536, 4, 4])
        self.assertEqual(len(meta["chunk_ranges"]), 6)
        arrays = np.load(self.bundle)
        self.assertEqual(arrays["level1.W"].shape, (24576, 20))
        self.assertEqual(arrays["level1.W"].dtype, np.float64)

    def test_import_numpy_savez(self):
        rng = np.random.default_rng(0)
        W1, b1 = rng.standard_normal((32, 5)), rng.standard_normal(32)
        W2, b2 = rng.standard_normal((8, 3)).astype(np.float32), rng.standard_normal(8).astype(np.float32)
        meta = {"latent_dim": 8, "chunk_ranges": [[0, 5], [5, 8]], "dims": [[2, 4, 4], [8, 1, 1]]}
        for saver, name in ((np.savez, "plain.zip"), (np.savez_compressed, "deflate.zip")):
            src = self.p(name)
            with open(src, "wb") as f:
                saver(f, **{"level1.W": W1, "level1.b": b1, "level2.W": W2, "level2.b": b2})
            with zipfile.ZipFile(src, "a") as z:
                z.writestr("meta.json", json.dumps(meta))
            out = self.p("canon_" + name)
            run("import", "--in", src, "--out", out)
            back = np.load(out)
            np.testing.assert_array_equal(back["level1.W"], W1)
            np.testing.assert_array_equal(back["level2.W"].astype(np.float32), W2)
            # Canonical containers re-import byte-identically.
            again = self.p("again_" + name)
            run("import", "--in", out, "--out", again)
            self.assertEqual(read(out), read(again))

    def test_import_zip64(self):
        src = self.p("z64.zip")
        rng = np.random.default_rng(1)
        arrays = {"level1.W": rng.standard_normal((16, 4)), "level1.b": rng.standard_normal(16)}
        meta = {"latent_dim": 4, "chunk_ranges": [[0, 4]], "dims": [[1, 4, 4]]}
        with zipfile.ZipFile(src, "w", compression=zipfile.ZIP_DEFLATED) as z:
            z.writestr("meta.json", json.dumps(meta))
            for key, value in arrays.items():
                with z.open(key + ".npy", "w", force_zip64=True) as f:
                    np.save(f, value)
        out = self.p("z64_canon.zip")
        run("import", "--in", src, "--out", out)
        back = np.load(out)
        for key, value in arrays.items():
            np.testing.assert_array_equal(back[key], value)

    def test_import_rejects_bad_containers(self):
        bad = self.p("bad.zip")
        with zipfile.ZipFile(bad, "w") as z:
            z.writestr("meta.json", json.dumps({"latent_dim": 4, "chunk_ranges": [[0, 4]], "dims": [[1, 2, 2]]}))
        self.assert_error(2, "import", "--in", bad)
        with zipfile.ZipFile(bad, "a") as z:
            with z.open("level1.W.npy", "w") as f:
                np.save(f, np.ones((4, 4)))
            with z.open("level1.b.npy", "w") as f:
                np.save(f, np.ones(3))
        report = self.p("report.json")
        self.assert_error(2, "import", "--in", bad, "--report", report)
        checks = {c["name"]: c["passed"] for c in json.loads(read(report))["checks"]}
        self.assertFalse(checks["level1.b.length"])

    def test_direction_writes_q_and_sidecar(self):
        q = self.p("q.npy")
        run("direction", "--bundle", self.bundle, "--level", "1", "--op", "zoom-in", "--out", q)
        self.assertEqual(np.load(q).shape, (20,))
        side = json.loads(read(q + ".json"))
        self.assertEqual(side["level"], 1)
        self.assertLess(side["residual"], 1e-8)
        qj = self.p("q.json")
        run("direction", "--bundle", self.bundle, "--op", "zoom-in", "--out", qj, "--format", "json")
        np.testing.assert_array_equal(np.array(json.loads(read(qj))["q"]), np.load(q))

    def test_walk_refine_composition_on_emitted_files(self):
        coarse, fine = self.p("coarse.npy"), self.p("fine.npy")
        base = ["walk", "--bundle", self.bundle, "--kind", "neumann", "--op", "zoom-in"]
        run(*base, "--steps", "10", "--out", coarse)
        run(*base, "--steps", "10", "--refine", "4", "--out", fine)
        a, b = np.load(coarse), np.load(fine)
        self.assertEqual(a.shape, (10, 120))
        self.assertEqual(b.shape, (10, 120))
        np.testing.assert_array_equal(a[0], b[0])
        err = np.linalg.norm(b[4] - a[1]) / np.linalg.norm(a[1])
        self.assertLessEqual(err, 1e-10)
        err = np.linalg.norm(b[8] - a[2]) / np.linalg.norm(a[2])
        self.assertLessEqual(err, 1e-10)
        # Only the level-1 chunk moves.
        np.testing.assert_array_equal(b[:, 20:], np.repeat(b[:1, 20:], 10, axis=0))
        side = json.loads(read(fine + ".json"))
        self.assertEqual(side["kind"], "neumann")
        self.assertEqual(side["refine"], 4)

    def test_circles(self):
        g = self.p("g.npy")
        run("walk", "--bundle", self.bundle, "--kind", "great-circle", "--level", "3", "--principal", "1",
            "--steps", "50", "--out", g)
        t = np.load(g)
        norms = np.linalg.norm(t[:, 40:60], axis=1)
        self.assertLess(np.max(np.abs(norms - norms[0])), 1e-12 * norms[0])
        s = self.p("s.json")
        run("walk", "--bundle", self.bundle, "--kind", "small-circle", "--principal", "2", "--reference", "5",
            "--match-linear", "0.3", "--steps", "20", "--out", s, "--format", "json")
        side = json.loads(read(s))
        self.assertEqual(len(side["points"]), 20)
        self.assertEqual(side["reference"], 5)
        self.assertIsNotNone(side["endpoint"])

    def test_determinism_and_seed(self):
        outs = []
        for i in range(2):
            prefix = self.p(f"det{i}")
            run("walk", "--bundle", self.bundle, "--kind", "great-circle", "--op", "shift-x",
                "--steps", "7", "--out", prefix + ".npy")
            run("principal", "--bundle", self.bundle, "--level", "1,2", "--out", prefix)
            outs.append([read(prefix + s) for s in
                         (".npy", ".npy.json", ".level1.V.npy", ".level1.json", ".level2.sigma.npy")])
        self.assertEqual(outs[0], outs[1])
        seeded = self.p("seeded.npy")
        run("walk", "--bundle", self.bundle, "--kind", "great-circle", "--op", "shift-x",
            "--steps", "7", "--out", seeded, env={"STEER_SEED": "17"})
        self.assertNotEqual(read(seeded), outs[0][0])
        flag = self.p("flag.npy")
        run("walk", "--bundle", self.bundle, "--kind", "great-circle", "--op", "shift-x",
            "--steps", "7", "--seed", "17", "--out", flag)
        self.assertEqual(read(seeded), read(flag))

    def test_transfer(self):
        a, b, c = self.p("a.npy"), self.p("b.npy"), self.p("c.npy")
        np.save(a, np.arange(120.0))
        np.save(b, -np.arange(120.0))
        run("transfer", "--schedule", "color", "--src", a, "--tgt", b, "--out", c,
            "--src-class", "207", "--tgt-class", "1")
        out = np.load(c)
        np.testing.assert_array_equal(out[:60], np.arange(60.0))
        np.testing.assert_array_equal(out[60:], -np.arange(60.0, 120.0))
        self.assertEqual(json.loads(read(c + ".json"))["class_label"], 207)
        run("transfer", "--schedule", "custom", "--levels", "2", "--bundle", self.bundle,
            "--src", a, "--tgt", b, "--out", c, "--format", "json")
        z = np.array(json.loads(read(c))["z"])
        np.testing.assert_array_equal(z[20:40], -np.arange(20.0, 40.0))

    def test_toygen_roundtrip(self):
        toy = self.p("toy.zip")
        img = self.p("toy.pgm")
        run("toygen", "--seed", "4", "--export", toy, "--image", img)
        self.assertTrue(read(img).startswith(b"P5\n16 16\n255\n"))
        q = self.p("toyq.npy")
        run("direction", "--bundle", toy, "--op", "shift-x", "--boundary", "cyclic", "--out", q)
        self.assertEqual(np.load(q).shape, (8,))
        fid = self.p("fid.json")
        run("toygen", "--seed", "4", "--op", "zoom-in", "--fidelity", fid, "--samples", "500")
        self.assertTrue(json.loads(read(fid))["closed_form_is_min"])

    def test_verify(self):
        proc = run("verify", "--bundle", self.bundle, "--only", "3,11")
        self.assertIn("PASS   3", proc.stdout)
        self.assertNotIn("FAIL", proc.stdout)
        proc = run("verify", "--only", "2", "--format", "json")
        self.assertTrue(json.loads(proc.stdout)[0]["passed"])

    def test_exit_codes(self):
        self.assert_error(1, "walk", "--bundle", self.bundle, "--nonsense")
        self.assert_error(1)
        self.assert_error(1, "direction", "--bundle", self.bundle, "--op", "shear", "--out", self.p("x.npy"))
        self.assert_error(1, "direction", "--bundle", self.bundle, "--level", "9", "--op", "zoom-in",
                          "--out", self.p("x.npy"))
        self.assert_error(1, "verify", "--only", "12")
        self.assert_error(1, "walk", "--bundle", self.bundle, "--out", self.p("x.npy"), env={"STEER_SEED": "abc"})
        self.assert_error(2, "direction", "--bundle", self.p("missing.zip"), "--op", "zoom-in",
                          "--out", self.p("x.npy"))
        np.save(self.p("short.npy"), np.zeros(3))
        self.assert_error(2, "walk", "--bundle", self.bundle, "--op", "zoom-in", "--z0", self.p("short.npy"),
                          "--out", self.p("x.npy"))
        self.assert_error(3, "walk", "--bundle", self.bundle, "--kind", "neumann", "--op", "identity",
                          "--require-endpoint", "--out", self.p("x.npy"))
        self.assert_error(3, "walk", "--bundle", self.bundle, "--kind", "neumann", "--op", "rot90",
                          "--refine", "2", "--out", self.p("x.npy"))
        self.assertFalse(os.path.exists(self.p("x.npy")))

    def test_no_temp_files_left(self):
        leftovers = [f for f in os.listdir(self.dir) if ".tmp" in f or f.startswith(".")]
        self.assertEqual(leftovers, [])


if __name__ == "__main__":
    STEER = sys.argv.pop(1)
    unittest.main(verbosity=2)
