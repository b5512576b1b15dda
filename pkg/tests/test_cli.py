import json

from cohomolab.cli import main


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def last_json(out):
    start = out.index("{")
    return json.loads(out[start:])


def test_check_relation_command(capsys):
    code, out = run(capsys, ["check-relation", "--dim", "2", "--max-total-degree", "3"])
    assert code == 0
    data = last_json(out)
    assert data["result"]["holds"] is True
    assert data["tool"] == "cohomolab"


def test_classify_command_with_cocycle(capsys):
    code, out = run(capsys, ["classify-equivariant", "--dim", "2", "--order", "3",
                             "--delta", "2", "--cocycle"])
    assert code == 0
    result = last_json(out)["result"]
    assert result["dimension"] == 1
    assert result["matched_paper_case"] == "c"
    assert result["solvers_agree"] is True
    assert result["coefficients"] == [["2", "9", "1", "2", "-5"]]
    basis = result["basis"][0]
    assert basis["alpha"] == {"2": "2", "3": "9"}
    assert basis["gamma"] == {"2": "-5"}


def test_table_command(capsys):
    code, out = run(capsys, ["cohomology-table", "--dim", "2", "--order", "2",
                             "--max-vf-degree", "2"])
    assert code == 0
    assert last_json(out)["result"]["all_match_expected"] is True


def test_verify_command_gamma1(capsys):
    code, out = run(capsys, ["verify-cocycle", "--name", "gamma1", "--dim", "2",
                             "--order", "2", "--max-vf-degree", "2"])
    assert code == 0
    result = last_json(out)["result"]
    assert result["cocycle_identity"]["holds"] is True
    assert result["vanishes_on_sl"] is False


def test_verify_command_div_with_omega(capsys):
    code, out = run(capsys, ["verify-cocycle", "--name", "div", "--dim", "2",
                             "--order", "2", "--a", "2/3", "--omega", "1*x2,1*x1",
                             "--max-vf-degree", "2"])
    assert code == 0
    assert last_json(out)["result"]["cocycle_identity"]["holds"] is True


def test_coboundary_command_affine(capsys):
    code, out = run(capsys, ["coboundary-test", "--name", "c1", "--dim", "2",
                             "--order", "2"])
    assert code == 0
    result = last_json(out)["result"]
    assert result["verdict"] == "no-witness-in-candidate-space"


def test_coboundary_command_custom_file(tmp_path, capsys):
    from cohomolab.operators import divergence_diffop, op_str
    from cohomolab.poly import single_ring

    path = tmp_path / "candidates.txt"
    path.write_text(op_str(divergence_diffop(single_ring(2))) + "\n")
    code, out = run(capsys, ["coboundary-test", "--name", "c1", "--dim", "2",
                             "--order", "2", "--candidates", "custom-file",
                             "--candidates-file", str(path)])
    assert code == 0
    assert last_json(out)["result"]["verdict"] == "no-witness-in-candidate-space"


def test_quantization_command_half(capsys):
    code, out = run(capsys, ["quantization-cocycle", "--dim", "2", "--order", "2",
                             "--lambda", "1/2", "--max-vf-degree", "2"])
    assert code == 0
    result = last_json(out)["result"]
    assert result["top_symbol_trivial"] is True
    assert result["projected_cocycle"]["nontrivial"] is True


def test_properties_command(capsys):
    code, out = run(capsys, ["properties", "--dim", "2", "--seed", "5",
                             "--count", "10"])
    assert code == 0
    assert out.count("PASS") >= 6


def test_bad_dimension_exits_2(capsys):
    assert main(["check-relation", "--dim", "1"]) == 2


def test_table_output_is_deterministic(capsys):
    argv = ["cohomology-table", "--dim", "2", "--order", "2", "--max-vf-degree", "2"]
    _, out1 = run(capsys, argv)
    _, out2 = run(capsys, argv)
    r1 = last_json(out1)
    r2 = last_json(out2)
    assert r1["result"] == r2["result"]
    assert json.dumps(r1["result"], sort_keys=True) == json.dumps(r2["result"], sort_keys=True)
