"""File format tests: graph files, configs, presets, CSV emitters."""

from __future__ import annotations

import json

import numpy as np
import pytest

import neurocost as nc
from neurocost import fileio


class TestGraphFiles:
    def test_round_trip(self, footnote_raw):
        text = fileio.emit_graph(footnote_raw)
        assert nc.parse_graph_file(text) == footnote_raw

    def test_bundled_graph_parses(self):
        from importlib import resources
        text = (resources.files("neurocost") / "data" / "footnote.graph").read_text()
        g = nc.validate_graph(nc.parse_graph_file(text))
        m = nc.compute_metrics(g)
        assert (m.t1, m.t_inf) == (4, 3)

    def test_syntax_error_position(self):
        with pytest.raises(nc.FileSyntaxError) as exc:
            nc.parse_graph_file('{"nodes": [}')
        assert exc.value.line == 1
        assert exc.value.column == 12

    def test_empty_text(self):
        with pytest.raises(nc.FileSyntaxError) as exc:
            nc.parse_graph_file("")
        assert (exc.value.line, exc.value.column) == (1, 1)

    @pytest.mark.parametrize("text, field", [
        ("[1, 2]", "$"),
        ('{"nodes": [], "bogus": 1}', "$"),
        ('{"nodes": [5]}', "nodes[0]"),
        ('{"nodes": [{"op": "relay"}]}', "nodes[0]"),
        ('{"nodes": [{"id": 3, "op": "relay"}]}', "nodes[0].id"),
        ('{"nodes": [{"id": "a"}]}', "nodes[0]"),
        ('{"nodes": [{"id": "a", "op": "relay"}, {"id": "a", "op": "relay"}]}',
         "nodes[1].id"),
        ('{"nodes": [{"id": "a", "op": "relay", "inputs": "b"}]}',
         "nodes[0].inputs"),
        ('{"nodes": [{"id": "a", "op": "relay", "inputs": [3]}]}',
         "nodes[0].inputs[0]"),
    ])
    def test_schema_errors_name_the_field(self, text, field):
        with pytest.raises(nc.SchemaError) as exc:
            nc.parse_graph_file(text)
        assert exc.value.field == field

    def test_declared_lists_are_optional(self):
        g = nc.parse_graph_file('{"nodes": [{"id": "a", "op": "relay"}]}')
        assert g.declared_inputs == ()
        assert g.declared_outputs == ()


class TestNeuralJson:
    def test_emit_shape(self):
        ng = nc.gen_self_exciting_loop()
        doc = json.loads(fileio.emit_neural_json(ng))
        assert sorted(doc) == ["inputs", "neurons", "outputs", "synapses"]
        neuron = doc["neurons"][0]
        assert neuron["id"] == "loop0"
        assert neuron["tau"] is None  # infinite time constant
        assert neuron["x0"] == 1.5
        syn = doc["synapses"][0]
        assert (syn["source"], syn["target"], syn["weight"], syn["delay"]) == \
            ("loop0", "loop0", 1.5, 1)


class TestConfig:
    def test_comments_and_layering(self):
        c = nc.parse_config("# scaled electrical costs\npreset = digital-skew\ne_spike = 7\n")
        assert c.e_spike == 7.0
        assert c.e_spikegen == 10.0  # inherited from the preset
        assert c.e_voltage == 1.0

    def test_unknown_key(self):
        with pytest.raises(nc.UnknownKey) as exc:
            nc.parse_config("nonsense_key = 1")
        assert exc.value.key == "nonsense_key"

    def test_negative_value(self):
        with pytest.raises(nc.NegativeConstant) as exc:
            nc.parse_config("e_spike = -2")
        assert exc.value.key == "e_spike"
        assert exc.value.value == -2.0

    @pytest.mark.parametrize("text", ["e_spike 2", "e_spike = abc", "n_core = 2.5"])
    def test_malformed_lines(self, text):
        with pytest.raises(nc.FileSyntaxError) as exc:
            nc.parse_config(text)
        assert exc.value.line == 1

    def test_n_core_parses_as_int(self):
        c = nc.parse_config("n_core = 4")
        assert c.n_core == 4
        assert isinstance(c.n_core, int)


class TestPresets:
    def test_builtin_names(self):
        assert sorted(fileio.PRESETS) == ["digital-skew", "unit"]
        assert fileio.load_preset("unit") == nc.preset("unit")

    def test_unknown_preset(self):
        with pytest.raises(nc.UnknownPreset) as exc:
            fileio.load_preset("bogus")
        assert exc.value.name == "bogus"

    def test_preset_dir_env(self, tmp_path, monkeypatch):
        (tmp_path / "custom.cfg").write_text("e_spike = 3\n")
        monkeypatch.setenv(fileio.PRESET_DIR_ENV, str(tmp_path))
        c = fileio.load_preset("custom")
        assert c.e_spike == 3.0
        assert c.e_op == 1.0

    def test_load_constants_layering(self, tmp_path):
        cfg = tmp_path / "my.cfg"
        cfg.write_text("e_voltage = 2\n")
        c = fileio.load_constants(preset_name="digital-skew", config_path=cfg)
        assert c.e_voltage == 2.0
        assert c.e_spike == 100.0

    def test_load_constants_default(self):
        assert fileio.load_constants() == nc.preset("unit")


class TestTraceCsv:
    @pytest.fixture()
    def kick_trace(self, footnote):
        ng, _ = nc.lower_graph(footnote, nc.relay_rules({"sub", "mul", "pow"}))
        state = nc.init_sim(ng, nc.AnalogEncoding(), 0)
        return nc.run_sim(state, 20, stop=nc.ZeroActivity(3),
                          inputs={0: tuple((n, 1.5) for n in ng.input_neurons)})

    def test_exact_rows(self, kick_trace):
        text = fileio.emit_trace_csv(kick_trace, window=2)
        lines = text.splitlines()
        assert lines[0] == ",".join(fileio.TRACE_COLUMNS)
        assert lines[1] == "0,2,0,0,0.0,0.5,0.0,2.0,0.0,0.0,2.0,2.0"
        assert lines[2] == "1,1,2,0,0.0,0.375,0.0,1.0,2.0,2.0,5.0,7.0"
        assert lines[3] == "2,1,1,0,0.0,0.25,0.0,1.0,1.0,1.0,3.0,10.0"
        assert lines[4] == "3,0,0,0,0.0,0.125,0.0,0.0,0.0,0.0,0.0,10.0"
        assert lines[-1] == "5,0,0,0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,10.0"
        assert "\r" not in text

    def test_empty_trace_is_header_only(self):
        empty = nc.SimTrace(records=(), f_series=np.zeros(0), e_n=0.0,
                            outputs=np.zeros((0, 1)), output_ids=("x",), n_total=1)
        assert fileio.emit_trace_csv(empty) == ",".join(fileio.TRACE_COLUMNS) + "\n"

    def test_window_validation(self, kick_trace):
        with pytest.raises(ValueError):
            fileio.emit_trace_csv(kick_trace, window=0)

    def test_deterministic_bytes(self, kick_trace):
        a = fileio.emit_trace_csv(kick_trace, window=3)
        b = fileio.emit_trace_csv(kick_trace, window=3)
        assert a == b


class TestTableCsv:
    def test_infinite_bounds_render(self):
        table = nc.mesh_cost_report(m_s=4, m_t=10, k=2, t1s=3, t_infs=3,
                                    n_mesh=2, c=nc.preset("unit"),
                                    f_series=[0.0] * 10)
        lines = fileio.emit_table_csv(table).splitlines()
        assert lines[0] == ",".join(fileio.TABLE_COLUMNS)
        assert lines[1] == "mesh,conventional,120.0,150.0,cpu_ideal,8.0,inf,120.0"
        assert lines[2] == "mesh,nmc,30.0,30.0,nmc_ideal,8.0,8.0,80.0"

    def test_rows_csv_reprs(self):
        text = fileio.emit_rows_csv(("a", "b"), [(0.1, float("inf")), (2, -3.5)])
        assert text == "a,b\n0.1,inf\n2,-3.5\n"
