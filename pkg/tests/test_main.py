"""
命令行入口测试
"""
import pytest

from torelli_lab.main import format_levels, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    values = dict(line.split(" = ", 1) for line in out.splitlines() if " = " in line)
    return code, values


@pytest.mark.parametrize(
    "levels,text",
    [([], "none"), ([2], "2"), ([2, 4], "2,4"), ([2, 3, 4, 6], "2..4,6"), ([2, 3, 5, 6, 7], "2,3,5..7")],
)
def test_format_levels(levels, text):
    assert format_levels(levels) == text


def test_homology_identity(capsys, samples_dir):
    code, values = run(capsys, "homology", "--file", str(samples_dir / "identity_g1.txt"))
    assert code == 0
    assert values["order"] == "1"
    assert values["torsion"] == "none"
    assert values["free_rank"] == "0"
    assert values["admissible_levels"] == "2..12"


def test_homology_lens(capsys, samples_dir):
    code, values = run(capsys, "homology", "--file", str(samples_dir / "lens_3.txt"))
    assert code == 0
    assert values["order"] == "3"
    assert values["torsion"] == "3"
    assert values["admissible_levels"] == "2,4"


def test_homology_free_part(capsys, samples_dir):
    code, values = run(capsys, "homology", "--file", str(samples_dir / "s1_x_s2.txt"))
    assert code == 0
    assert values["order"] == "infinite"
    assert values["free_rank"] == "1"
    assert values["admissible_levels"] == "none"


def test_lens_command(capsys):
    code, values = run(capsys, "lens", "--d", "5", "--k", "2", "--l", "2")
    assert code == 0
    assert values["order"] == "11"
    assert values["phi"] == "3"
    assert "r" not in values


def test_phi_from_file_matches_lens(capsys, samples_dir):
    code, values = run(capsys, "invariant", "phi", "--file", str(samples_dir / "lens_level5.txt"))
    assert code == 0
    assert values["phi"] == "3"


def test_r_from_file_matches_lens(capsys, samples_dir):
    _, from_lens = run(capsys, "lens", "--d", "5", "--k", "2", "--l", "2", "--p", "5")
    code, from_file = run(
        capsys, "invariant", "r", "--p", "5", "--file", str(samples_dir / "lens_level5_cube.txt")
    )
    assert code == 0
    assert from_file["r"] == from_lens["r"]


def test_form_eval_wedges(capsys):
    code, values = run(
        capsys, "form", "eval", "--form", "theta", "--x", "a1^a2^a3", "--y", "b1^b2^b3"
    )
    assert code == 0
    assert values["Theta"] == "4"


def test_form_eval_unknown_form(capsys):
    code, _ = run(capsys, "form", "eval", "--form", "nope", "--x", "a1^a2^a3", "--y", "b1^b2^b3")
    assert code == 2


def test_coinv_command(capsys):
    code, values = run(capsys, "coinv", "--space", "sp", "--g", "4", "--p", "5")
    assert code == 0
    assert values["dimension"] == "1"
    assert values["generators_span"] == "true"
    assert values["trace_factorization"] == "true"


def test_verify_command(capsys):
    code, values = run(capsys, "verify", "invariants", "--g", "2", "--trials", "5")
    assert code == 0
    assert values["invariants"] == "PASS"


def test_output_file(capsys, tmp_path):
    out = tmp_path / "report.txt"
    code, _ = run(capsys, "lens", "--d", "5", "--k", "2", "--l", "2", "--output", str(out))
    assert code == 0
    assert "phi = 3" in out.read_text(encoding="utf-8").splitlines()


def test_missing_file_exit_code(capsys, tmp_path):
    code, values = run(capsys, "homology", "--file", str(tmp_path / "absent.txt"))
    assert code == 2
    assert values == {}


def test_gate_exit_codes(capsys):
    assert run(capsys, "lens", "--k", "1", "--l", "1")[0] == 2
    assert run(capsys, "verify", "forms", "--g", "3")[0] == 2
    assert run(capsys, "homology")[0] == 2


def test_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["coinv", "--space", "nowhere"])
    assert excinfo.value.code == 2
