"""A small hand-built adhesive-application plant used in tests and demos.

One line, two stations, three process steps:

    PS1 {Weight, SortingTime} -> PS2 {Humidity, AmountAdhesive, Pressure}
                              -> PS3 {HeatInput}
"""

from .kg import Edge, EdgeKind, KnowledgeGraph, Node, NodeKind, VariableRole

DEMO_LINE = "L1"
DEMO_PRODUCT = "P1"

DEMO_VARIABLES = [
    "Weight",
    "SortingTime",
    "Humidity",
    "AmountAdhesive",
    "Pressure",
    "HeatInput",
]


def demo_plant(with_roles: bool = True) -> KnowledgeGraph:
    nodes = [
        Node("L1", NodeKind.LINE, "Assembly Line 1"),
        Node("ST1", NodeKind.STATION, "Feeding Station"),
        Node("ST2", NodeKind.STATION, "Bonding Station"),
        Node("PS1", NodeKind.PROCESS_STEP, "Sorting"),
        Node("PS2", NodeKind.PROCESS_STEP, "Adhesive Application"),
        Node("PS3", NodeKind.PROCESS_STEP, "Curing"),
        Node("Weight", NodeKind.SENSOR_VARIABLE, "Weight"),
        Node("SortingTime", NodeKind.SENSOR_VARIABLE, "Sorting Time"),
        Node("Humidity", NodeKind.SENSOR_VARIABLE, "Humidity"),
        Node("AmountAdhesive", NodeKind.SENSOR_VARIABLE, "Amount Adhesive"),
        Node("Pressure", NodeKind.SENSOR_VARIABLE, "Pressure"),
        Node("HeatInput", NodeKind.SENSOR_VARIABLE, "Heat Input"),
        Node("P1", NodeKind.PRODUCT, "Battery Module"),
    ]
    edges = [
        Edge("L1", EdgeKind.HAS_STATION, "ST1"),
        Edge("L1", EdgeKind.HAS_STATION, "ST2"),
        Edge("ST1", EdgeKind.FOLLOWS_STATION, "ST2"),
        Edge("ST1", EdgeKind.HAS_PROCESS_STEP, "PS1"),
        Edge("ST1", EdgeKind.HAS_PROCESS_STEP, "PS2"),
        Edge("PS1", EdgeKind.FOLLOWS_PROCESS_STEP, "PS2"),
        Edge("ST2", EdgeKind.HAS_PROCESS_STEP, "PS3"),
        Edge("PS1", EdgeKind.MEASURES, "Weight"),
        Edge("PS1", EdgeKind.MEASURES, "SortingTime"),
        Edge("PS2", EdgeKind.MEASURES, "Humidity"),
        Edge("PS2", EdgeKind.MEASURES, "AmountAdhesive"),
        Edge("PS2", EdgeKind.MEASURES, "Pressure"),
        Edge("PS3", EdgeKind.MEASURES, "HeatInput"),
        Edge("P1", EdgeKind.PRODUCED_ON, "L1"),
    ]
    roles = {}
    if with_roles:
        roles = {
            "Humidity": VariableRole.ROOT,
            "HeatInput": VariableRole.LEAF,
            "SortingTime": VariableRole.IRRELEVANT,
        }
    return KnowledgeGraph(tuple(nodes), tuple(edges), roles)
