import io
import os
import subprocess
import sys


from quasifree import fixtures as fx
from quasifree.cli import main
from quasifree.textio import format_morphisms, parse_algebra

from conftest import FIXTURES


def fix(name):
    return os.path.join(FIXTURES, name)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check():
    assert run("check", fix("cp2.alg")) == (0, "minimal: yes, sparse: yes, d²=0: yes\n")
    assert run("check", fix("nonsparse.alg"))[1].startswith("minimal: yes, sparse: no")
    assert run("check", fix("cylinder.alg"))[1].startswith("minimal: no")


def test_check_reports_failed_square(tmp_path):
    p = tmp_path / "bad.alg"
    p.write_text("algebra com cochain cutoff 9\ngen a 2\ngen b 3\ngen e 4\nd b = a*a\nd e = a*b\n")
    code, text = run("check", str(p))
    assert code == 1 and text.startswith("d²=0: no")


def test_truncate_cp_infinity():
    code, text = run("truncate", fix("cp_inf.alg"), "--degree", "3")
    assert code == 0
    assert parse_algebra(text) == fx.cp_model(2, 9)


def test_homology():
    code, text = run("homology", fix("cp2.alg"), "--from", "1", "--to", "6")
    assert code == 0
    assert text.split("\n")[:6] == ["H_1: 1", "H_2: 0", "H_3: 0", "H_4: 1", "H_5: 0", "H_6: 0"]
    assert run("homology", fix("lambda_uw.alg"), "--from", "0", "--to", "4")[1].startswith("H^0: 1")


def test_homotopic_distinct_scalings():
    code, text = run("homotopic", fix("lambda2.mor"), fix("lambda3.mor"),
                     "--source", fix("cp2.alg"), "--target", fix("cp2.alg"))
    assert code == 1
    assert "reason: H1 invariant differs: 2 vs 3" in text


def test_homotopic_with_certificate(tmp_path):
    from quasifree.homotopy import Homotopy
    B = fx.cp_model(3, 9)
    h = Homotopy.build(fx.scaling(B, 2), {"x3": [B.free.bracket(B.gen("x2"), B.gen("x2"))]})
    f, g = h.endpoints()
    (tmp_path / "f.mor").write_text(format_morphisms([f]))
    (tmp_path / "g.mor").write_text(format_morphisms([g]))
    code, text = run("homotopic", str(tmp_path / "f.mor"), str(tmp_path / "g.mor"),
                     "--source", fix("cp3.alg"), "--target", fix("cp3.alg"), "--certificate")
    assert code == 0
    assert "homotopic: yes" in text and "reason: homotopy constructed" in text
    assert "\nbeta x3 0 = " in text


def test_extend_map_and_homotopy(tmp_path):
    (tmp_path / "f5.mor").write_text("map x3 = 3 [x1,[x1,x2]]\n")
    (tmp_path / "g5.mor").write_text("map x3 = -2 [x1,[x1,x2]]\n")
    code, text = run("extend-map", str(tmp_path / "f5.mor"), "--source", fix("cp_inf.alg"),
                     "--target", fix("cp2.alg"), "--degree", "5", "--seed", "1")
    assert code == 0 and "map x4 = " in text
    (tmp_path / "F.mor").write_text(text)
    code, text = run("extend-map", str(tmp_path / "g5.mor"), "--source", fix("cp_inf.alg"),
                     "--target", fix("cp2.alg"), "--degree", "5")
    (tmp_path / "G.mor").write_text(text)
    code, text = run("extend-homotopy", str(tmp_path / "F.mor"), str(tmp_path / "G.mor"),
                     "--source", fix("cp_inf.alg"), "--target", fix("cp2.alg"), "--degree", "5")
    assert code == 0 and text.startswith("homotopy")


def test_extend_map_obstructed(tmp_path):
    (tmp_path / "L1.alg").write_text("algebra lie chain cutoff 9\ngen x1 1\n")
    (tmp_path / "f.mor").write_text("map x1 = x1\n")
    code, text = run("extend-map", str(tmp_path / "f.mor"), "--source", fix("cp2.alg"),
                     "--target", str(tmp_path / "L1.alg"), "--degree", "1")
    assert code == 1 and text.startswith("obstruction at x2")


def test_ce_quillen_minimalize():
    code, text = run("ce", fix("cp2.alg"), "--cutoff", "8")
    assert code == 0 and text.startswith("algebra com cochain unitary cutoff 8")
    code, text = run("quillen", fix("lambda_u.alg"), "--cutoff", "8")
    assert "d x7 = [x1,x5] + 1/2 [x3,x3]" in text
    code, text = run("minimalize", fix("cylinder.alg"))
    assert code == 0 and parse_algebra(text).is_minimal()


def test_finite_generation_exit_codes():
    code, text = run("finite-gen", fix("cp2_cohomology.alg"))
    assert code == 0 and "generators: 2" in text
    code, text = run("finite-gen", fix("lambda_u.alg"))
    assert code == 1 and "finitely generated: no" in text


def test_aut_check(tmp_path):
    code, text = run("aut-check", fix("cp2.alg"), "--level", "3", "--samples", fix("samples.mor"))
    assert code == 0
    assert "lambda=1: automorphism: yes, unipotent: yes, homotopic to identity: yes" in text
    (tmp_path / "bad.mor").write_text("map x1 = 2 x1\nmap x2 = 5 x2\n")
    code, text = run("aut-check", fix("cp2.alg"), "--level", "3", "--samples", str(tmp_path / "bad.mor"))
    assert code == 1 and "does not commute with d" in text


def test_main_theorem():
    code, text = run("main-theorem", "--lie", fix("cp2.alg"), "--com", fix("lambda_uw.alg"), "--level", "4",
                     "--samples", fix("samples.mor"))
    assert code == 0, text
    assert text.rstrip().endswith("result: pass")


def test_errors_exit_3(tmp_path):
    assert run("check", str(tmp_path / "missing.alg"))[0] == 3
    assert run("homology", fix("cp2.alg"), "--bogus")[0] == 3
    assert run("frobnicate")[0] == 3
    assert run("homology", fix("cp2.alg"), "--to", "12")[0] == 3
    (tmp_path / "bad.alg").write_text("algebra lie chain cutoff 9\ngen x1 1\nd x1 = [x1,")
    assert run("check", str(tmp_path / "bad.alg"))[0] == 3


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "quasifree.cli", "check", fix("cp2.alg")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "minimal: yes, sparse: yes, d²=0: yes\n"
