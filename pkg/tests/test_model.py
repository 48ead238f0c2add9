import pytest

from builders import CAN, FLEXRAY, LIN, LVDS, MOST, can_pair, ecu, instance, line, station, task
from dvcsched.model import (
    BusType,
    DiagnosticClass,
    ProcessType,
    bus_ready_station,
    validate_instance,
    validate_topology,
)


def rules(issues):
    return {i.rule for i in issues}


class TestEnums:
    def test_five_buses(self):
        assert [b.value for b in BusType] == ["CAN", "FlexRay", "LIN", "MOST", "LVDS"]

    @pytest.mark.parametrize("text", ["can", "CAN", " flexray ", "Lin", "most", "lvds"])
    def test_bus_parse_case_insensitive(self, text):
        assert BusType.parse(text).value.lower() == text.strip().lower()

    def test_unknown_bus(self):
        with pytest.raises(ValueError):
            BusType.parse("ethernet")

    def test_dc_ordering(self):
        assert DiagnosticClass.DC0 < DiagnosticClass.DC1 < DiagnosticClass.DC4
        assert DiagnosticClass.DC2 < 3

    def test_process_order(self):
        assert sorted(ProcessType, reverse=True) == [
            ProcessType.CALCOM, ProcessType.CONFIGURATION, ProcessType.FLASH, ProcessType.ID_CHECK
        ]

    @pytest.mark.parametrize("text,proc", [("id_check", ProcessType.ID_CHECK), ("ID Check", ProcessType.ID_CHECK),
                                           ("flash", ProcessType.FLASH), ("configuration", ProcessType.CONFIGURATION),
                                           ("calcom", ProcessType.CALCOM)])
    def test_process_parse(self, text, proc):
        assert ProcessType.parse(text) is proc


class TestValidateTopology:
    def test_master_slave_can_is_clean(self):
        topo = can_pair() + [ecu("door", CAN, 1, master="gw")]
        assert validate_topology(topo, line(3)) == []

    def test_one_cold_starter(self):
        topo = [
            ecu("fr1", FLEXRAY, 4, "30", term=True, cold=True),
            ecu("fr2", FLEXRAY, 3, term=True),
        ]
        assert "FlexRayColdStarterCount" in rules(validate_topology(topo, line(2)))

    def test_master_not_dc4(self):
        topo = can_pair() + [ecu("door", CAN, 1, master="t2")]
        issues = validate_topology(topo, line(2))
        assert [(i.subject, i.rule) for i in issues] == [("door", "MasterNotDC4")]

    def test_dc_master_pairing(self):
        topo = can_pair() + [ecu("orphan", CAN, 2), ecu("boss", CAN, 3, master="gw")]
        got = {(i.subject, i.rule) for i in validate_topology(topo, line(2))}
        assert got == {("orphan", "MasterMissing"), ("boss", "UnexpectedMaster")}

    def test_master_on_other_bus(self):
        topo = can_pair() + [ecu("lm", LIN, 4), ecu("door", LIN, 1, master="gw")]
        assert "MasterBusMismatch" in rules(validate_topology(topo, line(2)))

    def test_flag_bus_mismatch(self):
        topo = can_pair() + [ecu("x", CAN, 3, cold=True), ecu("lm", LIN, 4, term=True)]
        assert {"ColdStarterNotFlexRay", "TerminatorBusInvalid"} <= rules(validate_topology(topo, line(2)))

    def test_terminator_count(self):
        topo = [ecu("gw", CAN, 4, term=True)]
        assert rules(validate_topology(topo, line(2))) == {"CanTerminatorCount"}

    def test_lin_needs_exactly_one_master(self):
        none = [ecu("a", LIN, 3)]
        two = [ecu("a", LIN, 4), ecu("b", LIN, 4)]
        assert "LinMasterCount" in rules(validate_topology(none, line(1)))
        assert "LinMasterCount" in rules(validate_topology(two, line(1)))

    def test_unknown_master_and_duplicate_id(self):
        topo = can_pair() + [ecu("door", CAN, 1, master="ghost"), ecu("door", CAN, 3)]
        assert {"MasterUnknown", "DuplicateEcuId"} <= rules(validate_topology(topo, line(2)))

    def test_station_indices(self):
        stations = [station(1), station(1), station(3)]
        got = {(i.subject, i.rule) for i in validate_topology([], stations)}
        assert got == {("station:1", "DuplicateStation"), ("station:3", "StationIndexGap")}

    def test_report_is_sorted_and_deterministic(self):
        topo = can_pair() + [ecu("z", CAN, 1), ecu("a", CAN, 1, master="t2")]
        first = validate_topology(topo, line(2))
        assert first == sorted(first)
        assert first == validate_topology(list(topo), line(2))

    def test_lvds_and_most_need_nothing(self):
        assert validate_topology([ecu("cam", LVDS, 3), ecu("amp", MOST, 3)], line(1)) == []


class TestValidateInstance:
    def test_task_cross_references(self):
        inst = instance(
            can_pair(),
            line(3),
            assembly={"gw": 1, "t2": 9},
            tasks=[task("ghost"), task("gw"), task("gw"), task("t2", ProcessType.FLASH, sub_ops=2)],
        )
        assert rules(validate_instance(inst)) == {
            "TaskUnknownEcu", "DuplicateTask", "SubOpsOutsideCalCom", "AssemblyStationUnknown"
        }


class TestBusReadyStation:
    def test_can_second_terminator(self):
        inst = instance(can_pair(), line(5), assembly={"gw": 2, "t2": 3})
        assert bus_ready_station(inst, CAN) == 3

    def test_flexray_takes_cold_starters_into_account(self):
        topo = [
            ecu("f1", FLEXRAY, 4, term=True, cold=True),
            ecu("f2", FLEXRAY, 3, term=True),
            ecu("f3", FLEXRAY, 3, cold=True),
        ]
        inst = instance(topo, line(10), assembly={"f1": 2, "f2": 3, "f3": 9})
        assert bus_ready_station(inst, FLEXRAY) == 9

    def test_lin_master(self):
        inst = instance([ecu("lm", LIN, 4), ecu("s", LIN, 1, master="lm")], line(5), assembly={"lm": 4, "s": 1})
        assert bus_ready_station(inst, LIN) == 4

    def test_most_with_and_without_master(self):
        with_master = instance([ecu("hu", MOST, 4), ecu("amp", MOST, 1, master="hu")], line(5),
                               assembly={"hu": 3, "amp": 1})
        plain = instance([ecu("amp", MOST, 3)], line(5), assembly={"amp": 2})
        assert bus_ready_station(with_master, MOST) == 3
        assert bus_ready_station(plain, MOST) == 1

    def test_lvds_always_ready(self):
        inst = instance([ecu("cam", LVDS, 3)], line(4), assembly={"cam": 4})
        assert bus_ready_station(inst, LVDS) == 1

    def test_never_ready(self):
        inst = instance(can_pair(), line(5), assembly={"gw": 2})
        assert bus_ready_station(inst, CAN) is None
