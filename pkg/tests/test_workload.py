import pytest

from empasim import (
    AnalogOffload,
    NeuronSpec,
    NeuronState,
    Stimulus,
    UsageError,
    Workload,
    WorkloadError,
    apply_time_grid,
    build_direct,
    build_fixed_work,
    build_layered,
    effective_compute_time,
)


def test_build_layered_matches_two_hidden_neuron_scenario():
    topo = build_direct(4, 1)
    wl = build_layered([1, 2, 1], 5, topo)
    specs = {spec.id: spec for spec in wl.neurons}
    assert set(specs) == {0, 1, 2, 3}
    assert specs[0].t_comp == 0 and specs[0].fan_in == 1 and specs[0].targets == (1, 2)
    assert specs[1].t_comp == 5 and specs[1].fan_in == 1 and specs[1].targets == (3,)
    assert specs[2].t_comp == 5 and specs[2].fan_in == 1 and specs[2].targets == (3,)
    assert specs[3].t_comp == 5 and specs[3].fan_in == 2 and specs[3].targets == ()
    assert wl.stimuli == (Stimulus(0, 0),)
    assert wl.grid_period is None


def test_build_layered_per_layer_compute_times():
    topo = build_direct(4, 1)
    wl = build_layered([1, 2, 1], [3, 8], topo)
    comp = {spec.id: spec.t_comp for spec in wl.neurons}
    assert comp == {0: 0, 1: 3, 2: 3, 3: 8}


def test_build_layered_validation():
    topo = build_direct(10, 1)
    with pytest.raises(UsageError):
        build_layered([3], 1, topo)
    with pytest.raises(UsageError):
        build_layered([1, 0, 1], 1, topo)
    with pytest.raises(UsageError):
        build_layered([1, 2, 1], [1, 2, 3], topo)


def test_neuron_fires_when_fan_in_complete():
    state = NeuronState(NeuronSpec(0, t_comp=5, fan_in=2))
    assert state.on_message(4) is None
    assert state.on_message(9) == (9, 14)


def test_neuron_single_argument_fires_immediately():
    state = NeuronState(NeuronSpec(0, t_comp=7, fan_in=1))
    assert state.on_message(0) == (0, 7)


def test_neuron_surplus_argument_is_an_error():
    state = NeuronState(NeuronSpec(0, t_comp=5, fan_in=0))
    with pytest.raises(WorkloadError):
        state.on_message(1)
    busy = NeuronState(NeuronSpec(1, t_comp=10, fan_in=1))
    busy.on_message(0)
    with pytest.raises(WorkloadError):
        busy.on_message(3)  # second wave completes mid-compute


def test_neuron_can_fire_again_after_finishing():
    state = NeuronState(NeuronSpec(0, t_comp=4, fan_in=1))
    assert state.on_message(0) == (0, 4)
    assert state.on_message(4) == (4, 8)


def test_effective_compute_time_offload_tradeoff():
    digital = NeuronSpec(0, t_comp=100, fan_in=1)
    assert effective_compute_time(digital) == 100
    offloaded = NeuronSpec(0, t_comp=100, fan_in=1, offload=AnalogOffload(10, 10_000))
    assert effective_compute_time(offloaded) == 20_010
    assert effective_compute_time(offloaded) > effective_compute_time(digital)
    # offload pays off exactly when t_comp - t_analog exceeds 2*t_ctx
    boundary = NeuronSpec(0, t_comp=30, fan_in=1, offload=AnalogOffload(10, 10))
    assert effective_compute_time(boundary) == 30


def test_grid_delivery_rounds_up_to_the_period():
    topo = build_direct(4, 1)
    wl = apply_time_grid(build_layered([1, 2, 1], 5, topo), 10)
    assert wl.grid_period == 10
    assert wl.grid_delivery_time(0) == 0
    assert wl.grid_delivery_time(1) == 10
    assert wl.grid_delivery_time(10) == 10
    assert wl.grid_delivery_time(11) == 20
    unit = apply_time_grid(wl, 1)
    for t in (0, 1, 7, 123):
        assert unit.grid_delivery_time(t) == t


def test_apply_time_grid_validation():
    topo = build_direct(4, 1)
    wl = build_layered([1, 2, 1], 5, topo)
    with pytest.raises(UsageError):
        apply_time_grid(wl, 0)


def test_build_fixed_work_splits_budget_evenly():
    topo = build_direct(7, 1)
    wl = build_fixed_work(5, 23, topo, output_compute_time=4)
    workers = [spec for spec in wl.neurons if spec.targets == (6,)]
    assert sorted(spec.t_comp for spec in workers) == [4, 4, 5, 5, 5]
    assert sum(spec.t_comp for spec in workers) == 23
    sink = next(spec for spec in wl.neurons if spec.id == 6)
    assert sink.fan_in == 5 and sink.t_comp == 4


def test_workload_validation():
    with pytest.raises(UsageError):
        Workload((NeuronSpec(0, 1, 1),), (Stimulus(9),))
    with pytest.raises(UsageError):
        Workload((NeuronSpec(0, 1, 1), NeuronSpec(0, 1, 1)), ())
    with pytest.raises(UsageError):
        Workload((NeuronSpec(0, 1, 1, targets=(5,)),), ())
    with pytest.raises(UsageError):
        Workload((NeuronSpec(0, 1, 1),), (Stimulus(0),), grid_period=0)
