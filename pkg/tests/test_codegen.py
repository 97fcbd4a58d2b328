from conftest import assert_matches_golden, emit_plan, load_spec
from wright2csp import codegen
from wright2csp.codegen import AssertionKind, emit, emit_header
from wright2csp.parser import parse_source
from wright2csp import alphabets, analyzer


def test_header_block():
    header = emit_header()
    assert "DFA = abstractEvent -> DFA |~| SKIP" in header
    assert "transparent diamond" in header
    assert "transparent normalise" in header
    assert "channel abstractEvent" in header
    assert "quant_semi({},_) = SKIP" in header
    assert "power_set({}) = {{}}" in header
    assert header.splitlines()[0] == "-- FDR compression functions"
    assert emit_header() == header  # deterministic


def test_dt1_matches_expected_connector_output():
    assert_matches_golden("dt1.txt", emit_plan("dt1.wrt").text)


def test_calculformule_matches_expected_component_output():
    assert_matches_golden("calculformule.txt", emit_plan("calculformule.wrt").text)


def test_dt3_matches_expected_configuration_output():
    assert_matches_golden("dt3.txt", emit_plan("dt3.wrt").text)


def test_connector_abstraction_uses_connector_alphabet():
    text = emit_plan("dt1.wrt").text
    assert "CSconnectorA = CSconnector [[ x <- abstractEvent | x <- ALPHA_CSconnector ]]" in text
    assert "ALPHA_Glue" not in text


def test_role_equations_are_role_prefixed_and_closed():
    text = emit_plan("dt1.wrt").text
    assert "ROLEClient = ((request -> (result -> ROLEClient)) |~| SKIP)" in text
    # the old failure printed the bare role name in recursive positions
    assert "(result -> Client)" not in text


def test_pipeconn_where_locals_precede_their_parents():
    text = emit_plan("pipeconn.wrt").text
    lines = text.splitlines()
    read_only = next(i for i, l in enumerate(lines) if l.startswith("ReadOnly = "))
    write_only = next(i for i, l in enumerate(lines) if l.startswith("WriteOnly = "))
    glue = next(i for i, l in enumerate(lines) if l.startswith("Glue = "))
    assert read_only < glue and write_only < glue
    assert lines.index("DoRead = ((read -> ROLEReader) [] (readEOF -> ExitOnly))") < lines.index(
        "ROLEReader = (DoRead |~| ExitOnly)"
    )


def test_component_only_style_checks_cleanly():
    # the single-component, single-port style that used to crash the old tool
    from wright2csp.engine import discharge_assertions

    plan = emit_plan("dt2.wrt")
    assert "assert pG [FD= COMPp" in plan.text
    results = discharge_assertions(plan.assertions, plan.definitions)
    assert [v.holds for _, v in results] == [True]


def test_every_assert_line_has_one_assertion_and_vice_versa():
    for fixture in ("dt1.wrt", "dt2.wrt", "dt3.wrt", "calculformule.wrt", "pipeconn.wrt", "double.wrt"):
        plan = emit_plan(fixture)
        assert_lines = [l for l in plan.text.splitlines() if l.startswith("assert ")]
        assert assert_lines == [a.label for a in plan.assertions], fixture


def test_emission_is_deterministic():
    a = emit_plan("dt3.wrt").text
    b = emit_plan("dt3.wrt").text
    assert a == b


def test_assertion_kinds_per_construct():
    plan = emit_plan("dt3.wrt")
    kinds = [a.kind for a in plan.assertions]
    assert kinds.count(AssertionKind.PORT_COMPUTATION) == 2
    assert kinds.count(AssertionKind.ROLE_DEADLOCK_FREE) == 2
    assert kinds.count(AssertionKind.CONNECTOR_DEADLOCK_FREE) == 1
    assert kinds.count(AssertionKind.PORT_ROLE) == 2


def test_property8_equations_present_for_configurations():
    text = emit_plan("dt3.wrt").text
    for needle in (
        "A_OutputPLUS = PORTOutput",
        "C_OriginPLUS = ROLEOrigin",
        "A_OutputPLUSDET = A_OutputPLUS",
        "B_InputPLUS = PORTInput",
        "C_TargetPLUS = ROLETarget",
        "B_InputPLUSDET = B_InputPLUS",
        "assert C_OriginPLUS [FD= A_OutputPLUSDET",
        "assert C_TargetPLUS [FD= B_InputPLUSDET",
        "ROLEOriginDET = ((a -> ROLEOriginDET) [] SKIP)",
        "ROLETargetDET = ((c -> ROLETargetDET) [] SKIP)",
    ):
        assert needle in text, needle


def test_single_port_component_degenerates_to_computation():
    text = emit_plan("dt3.wrt").text
    assert "COMPOutput = (ComputationAtype)\\ diff(ALPHA_Atype, { |Output| })" in text


def test_fully_initiated_port_detr_prints_skip():
    text = emit_plan("calculformule.wrt").text
    assert "PORTOutDETR = SKIP" in text
    assert "PORTInDETR = ((read -> PORTInDETR) [] (close -> SKIP))" in text


def test_initiated_subset_line_only_when_events_observed():
    text = emit_plan("calculformule.wrt").text
    assert "ALPHA_InI = {}" in text
    assert "ALPHA_OutI" not in text
    assert "-- no events observed!" in text


def test_channel_declarations():
    text = emit_plan("dt1.wrt").text
    assert "channel Client: {request, result}" in text
    assert "channel Server: {invoke, return}" in text
    first = text.splitlines()
    base = next(l for l in first if l.startswith("channel ") and ":" not in l and "abstractEvent" not in l)
    assert set(base[len("channel "):].split(", ")) == {"request", "result", "invoke", "return"}


def test_glue_gets_connector_suffix_only_in_configurations():
    style_text = emit_plan("dt1.wrt").text
    assert "\nGlue = " in style_text
    config_text = emit_plan("dt3.wrt").text
    assert "\nGlueCtype = " in config_text
    assert "\nGlue = " not in config_text


def test_emitted_definitions_resolve_everywhere():
    from wright2csp.engine import compile_to_lts

    for fixture in ("dt1.wrt", "dt3.wrt", "calculformule.wrt", "pipeconn.wrt", "double.wrt", "deadconn.wrt"):
        plan = emit_plan(fixture)
        for name, term in plan.definitions.items():
            compile_to_lts(term, plan.definitions)  # raises if a reference dangles


def test_duplicate_output_names_are_flagged():
    spec, _ = parse_source(
        "Style S\n"
        "Connector K\n"
        "  Role R = Work |~| TICK where { Work = a -> R }\n"
        "  Role S2 = Work |~| TICK where { Work = b -> S2 }\n"
        "  Glue = R.a -> Glue [] S2.b -> Glue [] TICK\n"
        "Constraints\nEnd Style"
    )
    analyzer.analyze(spec)
    alphabets.annotate(spec)
    plan = codegen.emit(spec)
    assert any("defined more than once" in d.message for d in plan.diagnostics)
