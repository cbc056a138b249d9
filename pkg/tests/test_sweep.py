import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lora_ser.analytic import ber_from_ser, ser_numeric_integration
from lora_ser.channel import ChannelParams
from lora_ser.link import LinkBudget
from lora_ser.modem import LoRaParams
from lora_ser.montecarlo import McConfig
from lora_ser.sweep import (
    CSV_HEADER,
    FIGURES,
    ChannelPreset,
    ConfigError,
    ErrorCurve,
    ErrorRow,
    GridSpec,
    SweepConfig,
    build_figure,
    emit_plot,
    load_config,
    read_csv,
    run_sweep,
    write_csv,
)


def cfg(**kw):
    base = dict(sf_list=[5], presets=[ChannelPreset("k1", k_factor=1.0)],
                ebn0_db=GridSpec(0, 40, 5), methods=["integral"])
    base.update(kw)
    return SweepConfig(**base)


class TestGridSpec:
    def test_values(self):
        assert GridSpec(0, 40, 5).values() == [0, 5, 10, 15, 20, 25, 30, 35, 40]
        assert len(GridSpec(0, 40, 1).values()) == 41
        assert GridSpec(3, 3, 1).values() == [3]

    def test_fractional_step_hits_stop(self):
        assert GridSpec(0, 1, 0.1).values()[-1] == pytest.approx(1.0)

    def test_parse(self):
        assert GridSpec.parse("0:40:2.5") == GridSpec(0, 40, 2.5)
        assert GridSpec.parse("7") == GridSpec(7, 7, 1)
        with pytest.raises(ConfigError):
            GridSpec.parse("0:40")


class TestValidation:
    @pytest.mark.parametrize("kw,field", [
        ({"sf_list": []}, "sf_list"),
        ({"sf_list": [20]}, "sf_list"),
        ({"presets": []}, "presets"),
        ({"ebn0_db": GridSpec(0, 10, 0)}, "ebn0_db"),
        ({"ebn0_db": GridSpec(10, 0, 1)}, "ebn0_db"),
        ({"methods": ["bogus"]}, "methods"),
        ({"methods": []}, "methods"),
        ({"methods": ["upper_rayleigh"]}, "methods"),
        ({"presets": [ChannelPreset("x", k_factor=-1.0)]}, "k_factor"),
        ({"presets": [ChannelPreset("x", mu_h=0j, sigma_h2=0.0)]}, "sigma_h2"),
        ({"presets": [ChannelPreset("x", mu_h=1.0)]}, "presets"),
        ({"output_path": ""}, "output_path"),
    ])
    def test_field_named(self, kw, field):
        with pytest.raises(ConfigError) as info:
            cfg(**kw).validate()
        assert info.value.field == field

    def test_preset_normalised(self):
        p = ChannelPreset("x", mu_h=2 + 0j, sigma_h2=2.0)
        assert p.channel().mean_power == pytest.approx(1.0)
        assert p.reported_k == pytest.approx(2.0)


class TestRunSweep:
    def test_row_count(self):
        curve = run_sweep(cfg(methods=["exact", "upper", "lower"]))
        assert len(curve) == 27
        assert all(r.status == "ok" for r in curve.rows)

    def test_single_point(self):
        curve = run_sweep(cfg(ebn0_db=GridSpec(10, 10, 1)))
        assert len(curve) == 1

    def test_exact_refused_at_sf12(self):
        curve = run_sweep(cfg(sf_list=[12], methods=["exact"]))
        assert len(curve) == 9
        for r in curve.rows:
            assert r.status == "skipped:precision"
            assert r.ser is None and r.ber is None

    def test_domain_skip(self):
        c = cfg(sf_list=[7], presets=[ChannelPreset("los", mu_h=1 + 0j, sigma_h2=0.0)],
                ebn0_db=GridSpec(20, 20, 1), methods=["upper_exp"])
        assert run_sweep(c).rows[0].status == "skipped:domain"

    def test_ber_and_stderr_columns(self):
        curve = run_sweep(cfg(methods=["mc", "integral"], ebn0_db=GridSpec(0, 5, 5),
                              mc=McConfig(trials=2000)))
        for r in curve.rows:
            assert r.ber == pytest.approx(r.ser * 16 / 31, rel=1e-15)
            if r.method == "mc":
                assert r.trials == 2000 and r.stderr is not None
            else:
                assert r.trials is None and r.stderr is None

    def test_rows_sorted(self):
        c = cfg(sf_list=[7, 5], presets=[ChannelPreset("a", k_factor=10.0), ChannelPreset("b", k_factor=0.1)],
                methods=["upper", "integral"], ebn0_db=GridSpec(0, 10, 5))
        rows = run_sweep(c).rows
        assert rows == sorted(rows, key=ErrorRow.sort_key)

    def test_values_equal_library_calls(self, tmp_path):
        c = cfg(sf_list=[7], presets=[ChannelPreset("k10", k_factor=10.0)], ebn0_db=GridSpec(0, 40, 10))
        path = tmp_path / "out.csv"
        write_csv(run_sweep(c), path)
        for r in read_csv(path).rows:
            lb = LinkBudget.from_ebn0_db(7, ChannelParams.from_k_factor(10.0), r.ebn0_db)
            ser = ser_numeric_integration(lb)
            assert r.ser == ser
            assert r.ber == ber_from_ser(LoRaParams(7), ser)

    def test_k_ordering_at_30db(self):
        c = cfg(sf_list=[12], presets=[ChannelPreset(f"k{k}", k_factor=k) for k in (0.1, 1.0, 10.0)],
                ebn0_db=GridSpec(30, 30, 1))
        bers = {r.k_factor: r.ber for r in run_sweep(c).rows}
        assert bers[0.1] > bers[1.0] > bers[10.0]


rows_strategy = st.lists(
    st.builds(
        ErrorRow,
        method=st.sampled_from(["mc", "integral", "upper"]),
        sf=st.integers(2, 12),
        k_factor=st.floats(0, 100) | st.just(math.inf),
        ebn0_db=st.floats(-10, 40),
        ser=st.floats(0, 1) | st.none(),
        ber=st.floats(0, 1) | st.none(),
        stderr=st.floats(0, 1) | st.none(),
        trials=st.integers(1, 10**9) | st.none(),
        status=st.sampled_from(["ok", "skipped:precision"]),
    ),
    max_size=20,
)


class TestCsv:
    def test_header_and_layout(self, tmp_path):
        path = tmp_path / "x.csv"
        write_csv(ErrorCurve([ErrorRow("integral", 5, 1.0, 10.0, 0.1, 0.05)]), path)
        raw = path.read_bytes()
        assert raw.startswith(b"method,sf,k_factor,ebn0_db,ser,ber,stderr,trials,status\n")
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
        assert raw.count(b"\n") == 2
        assert raw.splitlines()[1] == b"integral,5,1,10,0.10000000000000001,0.050000000000000003,,,ok"

    def test_seventeen_digits_round_trip(self, tmp_path):
        x = 1 / 3
        path = tmp_path / "x.csv"
        write_csv(ErrorCurve([ErrorRow("integral", 5, 1.0, 0.1, x, x * 16 / 31)]), path)
        assert read_csv(path).rows[0].ser == x

    @settings(max_examples=50)
    @given(rows_strategy)
    def test_round_trip(self, tmp_path_factory, rows):
        path = tmp_path_factory.mktemp("rt") / "x.csv"
        curve = ErrorCurve(rows)
        write_csv(curve, path)
        assert read_csv(path).rows == curve.sorted().rows

    def test_bad_header(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n")
        with pytest.raises(ValueError):
            read_csv(path)

    def test_header_constant(self):
        assert ",".join(CSV_HEADER) == "method,sf,k_factor,ebn0_db,ser,ber,stderr,trials,status"


class TestPlot:
    def test_fig4_has_four_curves(self, tmp_path):
        c = FIGURES["fig4"]()
        c.ebn0_db = GridSpec(0, 40, 10)
        c.mc = McConfig(trials=2000)
        curve = run_sweep(c)
        fig = build_figure(curve)
        ax = fig.axes[0]
        assert len(ax.get_lines()) == 4
        assert ax.get_yscale() == "log"
        assert ax.get_ylim() == pytest.approx((1e-6, 1.0))
        assert ax.get_xscale() == "linear"
        path = tmp_path / "fig4.svg"
        emit_plot(curve, path)
        text = path.read_text()
        assert text.lstrip().startswith("<?xml") and "<svg" in text

    def test_single_point_curves(self, tmp_path):
        curve = run_sweep(cfg(methods=["integral", "upper"], ebn0_db=GridSpec(10, 10, 1)))
        emit_plot(curve, tmp_path / "one.svg")
        lines = build_figure(curve).axes[0].get_lines()
        assert len(lines) == 2
        assert all(line.get_marker() == "o" for line in lines)

    def test_skipped_rows_do_not_break_plot(self, tmp_path):
        curve = run_sweep(cfg(sf_list=[12], methods=["exact", "integral"], ebn0_db=GridSpec(0, 10, 5)))
        emit_plot(curve, tmp_path / "s.svg")

    def test_deterministic_svg(self, tmp_path):
        curve = run_sweep(cfg(methods=["upper", "lower"]))
        emit_plot(curve, tmp_path / "a.svg")
        emit_plot(curve, tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_k_families_ordered_at_30db(self):
        c = cfg(sf_list=[12], presets=[ChannelPreset(f"k{k}", k_factor=k) for k in (0.1, 1.0, 10.0)],
                ebn0_db=GridSpec(20, 40, 5))
        fig = build_figure(run_sweep(c))
        at30 = {}
        for line in fig.axes[0].get_lines():
            xs, ys = line.get_data()
            at30[line.get_label()] = dict(zip(xs, ys))[30.0]
        vals = [at30[f"integral, SF=12, K={k:g}"] for k in (0.1, 1.0, 10.0)]
        assert vals[0] > vals[1] > vals[2]

    def test_empty_curve(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plot(ErrorCurve([]), tmp_path / "e.svg")


class TestConfigFile:
    def test_full_file(self, tmp_path):
        path = tmp_path / "s.ini"
        path.write_text(
            "[sweep]\nsf_list = 5, 7\nebn0_db = 0:20:10\nmethods = integral, mc\n"
            "output_path = out.csv\nplot_path = out.svg\n\n"
            "[mc]\ntrials = 5000\nseed = 9\nbatch_size = 1024\ntarget_errors = 100\nparallel_workers = 2\n\n"
            "[preset los]\nmu_h = 0.8+0.6j\nsigma_h2 = 0.0\n\n"
            "[preset k3]\nk_factor = 3\n"
        )
        c = load_config(path)
        c.validate()
        assert c.sf_list == [5, 7]
        assert c.ebn0_db == GridSpec(0, 20, 10)
        assert c.methods == ["integral", "mc"]
        assert c.output_path == "out.csv" and c.plot_path == "out.svg"
        assert (c.mc.trials, c.mc.seed, c.mc.batch_size, c.mc.target_errors, c.mc.parallel_workers) == (5000, 9, 1024, 100, 2)
        assert [p.name for p in c.presets] == ["los", "k3"]
        assert c.presets[0].mu_h == 0.8 + 0.6j
        assert c.presets[1].k_factor == 3.0

    @pytest.mark.parametrize("text,field", [
        ("[sweep]\nbogus = 1\n", "bogus"),
        ("[weird]\n", "weird"),
        ("[mc]\ntrials = lots\n", "trials"),
        ("[mc]\ntrials = 0\n", "mc"),
        ("[sweep]\nsf_list = 7, x\n", "sf_list"),
        ("[preset a]\nmu_h = nope\nsigma_h2 = 1\n", "mu_h"),
        ("not an ini file", "config"),
    ])
    def test_errors_name_field(self, tmp_path, text, field):
        path = tmp_path / "bad.ini"
        path.write_text(text)
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert info.value.field == field

    def test_base_is_not_mutated(self, tmp_path):
        base = FIGURES["fig1"]()
        path = tmp_path / "s.ini"
        path.write_text("[sweep]\nsf_list = 7\n")
        c = load_config(path, base=base)
        assert c.sf_list == [7] and base.sf_list == [5]
