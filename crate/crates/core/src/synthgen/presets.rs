//! Bundled generator configs. Task, slot and frame inventories follow the
//! three reference domains; every probability is synthetic.

use std::collections::BTreeMap;

use crate::corpus::{bundled_schema, TaskSchema, DEFAULT_THRESHOLD};

use super::{ConfidenceModel, EmissionPattern, GeneratorConfig, START};

pub const SOFTHARD_TASKS: [&str; 15] = [
    "Opening",
    "Problem-statement",
    "User-identification",
    "Problem-clarification",
    "Printer",
    "Network connection",
    "PC going slow",
    "Monitor",
    "Keyboard",
    "Mouse",
    "CD-DVD player",
    "Power supply",
    "Virus",
    "Closing",
    "Out-of-the-Task",
];

pub const SOFTHARD_SLOTS: [&str; 16] = [
    "Concept",
    "Computer-Hardware",
    "Time-PartoftheDay",
    "Negation",
    "Action",
    "Person-Name",
    "Person-Surname",
    "Location-Institution",
    "Code",
    "Location-Other",
    "Location-TelephoneNumber",
    "Ordinal-Number",
    "Cardinal-Number",
    "Time-RelativeTime",
    "Problem",
    "Person-Position",
];

pub const SOFTHARD_FRAMES: [&str; 10] = [
    "Telling",
    "Greeting",
    "Contacting",
    "Statement",
    "Recording",
    "Communication",
    "Being operational",
    "Change operational state",
    "Operational testing",
    "Being in operation",
];

pub const DIHANA_TASKS: [&str; 19] = [
    "Welcome",
    "Ask_for_query",
    "Confirm_query",
    "Timetables_query_ask_for_attribute",
    "Timetables_query_confirm_attribute",
    "Timetables_query_provide_results",
    "Fares_query_ask_for_attribute",
    "Fares_query_confirm_attribute",
    "Fares_query_provide_results",
    "TripTime_query_ask_for_attribute",
    "TripTime_query_confirm_attribute",
    "TripTime_query_provide_results",
    "TypesTrain_query_ask_for_attribute",
    "TypesTrain_query_confirm_attribute",
    "TypesTrain_query_provide_results",
    "Services_query_ask_for_attribute",
    "Services_query_confirm_attribute",
    "Services_query_provide_results",
    "Goodbye",
];

pub const DIHANA_SLOTS: [&str; 15] = [
    "Hour",
    "Price",
    "Train-Type",
    "Trip-Time",
    "Services",
    "Origin",
    "Destination",
    "Departure-Date",
    "Arrival-Date",
    "Departure-Hour",
    "Arrival-Hour",
    "Class",
    "Order-Number",
    "Number-Trains",
    "Trip-Type",
];

/// The second `Ask_for_query` of the published inventory is listed as
/// `Ask_for_attribute` so that labels stay unique.
pub const LETSGO_TASKS: [&str; 14] = [
    "Welcome",
    "Ask_for_query",
    "Ask_for_attribute",
    "Ask_for_help",
    "Confirm_query",
    "Confirm_attribute",
    "Looking_up_database",
    "Restart_dialog",
    "New_query",
    "Provide_results",
    "Error",
    "Provide_instructions",
    "Query_error",
    "Goodbye",
];

pub const LETSGO_SLOTS: [&str; 15] = [
    "from.monument",
    "from.road",
    "from.neighborhood",
    "from.stop",
    "to.monument",
    "to.road",
    "to.neighborhood",
    "to.stop",
    "time.next",
    "time.previous",
    "time.hour",
    "time.period",
    "time.day",
    "time.relative",
    "route",
];

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn p(weight: f64) -> EmissionPattern {
    EmissionPattern::new(weight)
}

struct Builder {
    schema: TaskSchema,
    transition: BTreeMap<String, BTreeMap<String, f64>>,
    emission: BTreeMap<String, Vec<EmissionPattern>>,
    system_acts: BTreeMap<String, Vec<String>>,
}

impl Builder {
    fn new(name: &str, tasks: &[&str], slots: &[&str], frames: &[&str]) -> Self {
        let schema = TaskSchema::new(name, strings(tasks), strings(slots), strings(frames), DEFAULT_THRESHOLD)
            .expect("preset schema is valid");
        Self::with_schema(schema)
    }

    fn shipped(file: &str, name: &str) -> Self {
        Self::with_schema(bundled_schema(file).expect("shipped schema").renamed(name))
    }

    fn with_schema(schema: TaskSchema) -> Self {
        Builder {
            schema,
            transition: BTreeMap::new(),
            emission: BTreeMap::new(),
            system_acts: BTreeMap::new(),
        }
    }

    fn go(&mut self, from: &str, to: &[(&str, f64)]) -> &mut Self {
        self.transition.insert(from.to_string(), dist(to));
        self
    }

    fn emit(&mut self, task: &str, patterns: Vec<EmissionPattern>) -> &mut Self {
        self.emission.insert(task.to_string(), patterns);
        self
    }

    fn system(&mut self, task: &str, acts: &[&str]) -> &mut Self {
        self.system_acts.insert(task.to_string(), strings(acts));
        self
    }

    fn build(self, confidence: ConfidenceModel, slot_noise: f64, num_dialogs: usize, mean_user_turns: f64) -> GeneratorConfig {
        GeneratorConfig {
            schema: self.schema,
            transition: self.transition,
            emission: self.emission,
            system_acts: self.system_acts,
            confidence,
            slot_noise,
            slot_confusions: BTreeMap::new(),
            out_of_task_rate: 0.0,
            out_of_task_label: None,
            num_dialogs,
            mean_user_turns,
        }
    }
}

/// Resolution subtasks with their signature slots and frame.
const SOFTHARD_RESOLUTION: [(&str, [&str; 2], &str); 9] = [
    ("Printer", ["Action", "Ordinal-Number"], "Being operational"),
    ("Network connection", ["Location-Other", "Location-Institution"], "Communication"),
    ("PC going slow", ["Time-RelativeTime", "Action"], "Being in operation"),
    ("Monitor", ["Ordinal-Number", "Negation"], "Operational testing"),
    ("Keyboard", ["Action", "Time-PartoftheDay"], "Operational testing"),
    ("Mouse", ["Location-Institution", "Ordinal-Number"], "Change operational state"),
    ("CD-DVD player", ["Time-PartoftheDay", "Negation"], "Change operational state"),
    ("Power supply", ["Negation", "Time-RelativeTime"], "Being operational"),
    ("Virus", ["Location-Other", "Action"], "Being in operation"),
];

fn softhard_chain(b: &mut Builder) {
    b.go(START, &[("Opening", 1.0)])
        .go("Opening", &[("Opening", 0.2), ("Problem-statement", 0.8)])
        .go("Problem-statement", &[("Problem-statement", 0.3), ("User-identification", 0.7)])
        .go("User-identification", &[("User-identification", 0.4), ("Problem-clarification", 0.6)]);
    let mut p4 = vec![("Problem-clarification", 0.3)];
    p4.extend(SOFTHARD_RESOLUTION.iter().map(|(t, _, _)| (*t, 0.7 / 9.0)));
    b.go("Problem-clarification", &p4);
    for (task, _, _) in SOFTHARD_RESOLUTION {
        b.go(task, &[(task, 0.75), ("Closing", 0.25)]);
    }
    b.go("Closing", &[("Closing", 1.0)]);

    for (task, acts) in softhard_system_acts() {
        b.system(task, acts);
    }
}

fn softhard_system_acts() -> Vec<(&'static str, &'static [&'static str])> {
    let mut acts: Vec<(&str, &[&str])> = vec![
        ("Opening", &["Greet", "Offer"]),
        ("Problem-statement", &["Info-request"]),
        ("User-identification", &["Info-request"]),
        ("Problem-clarification", &["ClarificationRequest"]),
        ("Closing", &["Thank", "Quit"]),
    ];
    acts.extend(SOFTHARD_RESOLUTION.iter().map(|(t, _, _)| (*t, &["Action-request"][..])));
    acts
}

/// Slots the recogniser mixes up; a mislabel stays inside its group.
const SOFTHARD_CONFUSABLE: [&[&str]; 6] = [
    &["Person-Name", "Person-Surname", "Person-Position"],
    &["Location-Institution", "Location-Other", "Location-TelephoneNumber"],
    &["Ordinal-Number", "Cardinal-Number", "Code"],
    &["Time-PartoftheDay", "Time-RelativeTime"],
    &["Concept", "Problem", "Computer-Hardware"],
    &["Action", "Negation"],
];

fn confusion_groups(groups: &[&[&str]]) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for group in groups {
        for &slot in *group {
            out.insert(slot.to_string(), strings(&group.iter().copied().filter(|&o| o != slot).collect::<Vec<_>>()));
        }
    }
    out
}

fn softhard_base(name: &str) -> Builder {
    let mut b = Builder::shipped("softhard", name);
    softhard_chain(&mut b);
    b
}

/// Human-machine style help-desk dialogs with 10% slot noise.
pub fn softhard() -> GeneratorConfig {
    let mut b = softhard_base("softhard");
    b.emit(
        "Opening",
        vec![
            p(0.8).acts(&["Greet"]).frames(&["Greeting"]),
            p(0.2).acts(&["Greet", "Inform"]).frames(&["Greeting"]),
        ],
    )
    .emit(
        "Problem-statement",
        vec![
            p(0.7).acts(&["Inform"]).slots(&["Problem", "Concept"]).frames(&["Statement"]),
            p(0.3).acts(&["Inform"]).slots(&["Problem"]).frames(&["Statement"]),
        ],
    )
    .emit(
        "User-identification",
        vec![
            p(0.7)
                .acts(&["Answer"])
                .slots(&["Person-Name", "Person-Surname", "Location-TelephoneNumber"])
                .frames(&["Contacting"]),
            p(0.3).acts(&["Answer"]).slots(&["Person-Name", "Person-Surname"]).frames(&["Contacting"]),
        ],
    )
    .emit(
        "Problem-clarification",
        vec![
            p(0.7)
                .acts(&["Answer"])
                .slots(&["Code", "Computer-Hardware", "Cardinal-Number"])
                .frames(&["Recording"]),
            p(0.3).acts(&["Answer"]).slots(&["Computer-Hardware", "Code"]).frames(&["Recording"]),
        ],
    )
    .emit(
        "Closing",
        vec![
            p(0.7).acts(&["Thank"]).slots(&["Person-Position"]).frames(&["Telling"]),
            p(0.3).acts(&["Thank", "Quit"]).slots(&["Person-Position"]).frames(&["Telling"]),
        ],
    );
    for (task, slots, frame) in SOFTHARD_RESOLUTION {
        b.emit(
            task,
            vec![
                p(0.7).acts(&["ReportOnAction"]).slots(&slots).frames(&[frame]),
                p(0.15).acts(&["Yes-answer"]).tiacts(&["Affirmation"]),
                p(0.15).acts(&["No-answer"]).tiacts(&["Negation"]),
            ],
        );
    }
    b.emit("Out-of-the-Task", vec![p(0.6).acts(&["Other"]), p(0.4).acts(&["Filler", "Ack"])]);
    let mut cfg = b.build(ConfidenceModel::default(), 0.1, 150, 10.3);
    cfg.slot_confusions = confusion_groups(&SOFTHARD_CONFUSABLE);
    cfg.out_of_task_label = Some("Out-of-the-Task".into());
    cfg
}

/// Human-human style: longer dialogs and 18% of user turns out of task.
pub fn softhard_hh() -> GeneratorConfig {
    let mut cfg = softhard();
    cfg.schema = cfg.schema.renamed("softhard-hh");
    cfg.out_of_task_rate = 0.18;
    cfg.mean_user_turns = 12.5;
    cfg
}

/// Deterministic chain through every in-task label, one pattern per task,
/// no noise, every mention above threshold.
pub fn softhard_clean() -> GeneratorConfig {
    let mut b = Builder::shipped("softhard", "softhard-clean");
    let chain: Vec<&str> = SOFTHARD_TASKS.iter().copied().filter(|&t| t != "Out-of-the-Task").collect();
    b.go(START, &[(chain[0], 1.0)]);
    for pair in chain.windows(2) {
        b.go(pair[0], &[(pair[1], 1.0)]);
    }
    b.go("Closing", &[("Closing", 1.0)]);
    for (task, acts) in softhard_system_acts() {
        b.system(task, acts);
    }
    b.emit("Opening", vec![p(1.0).acts(&["Greet"]).frames(&["Greeting"])])
        .emit(
            "Problem-statement",
            vec![p(1.0).acts(&["Inform"]).slots(&["Problem"]).frames(&["Statement"])],
        )
        .emit(
            "User-identification",
            vec![p(1.0).acts(&["Answer"]).slots(&["Person-Name", "Person-Surname"]).frames(&["Contacting"])],
        )
        .emit(
            "Problem-clarification",
            vec![p(1.0).acts(&["Answer"]).slots(&["Code", "Computer-Hardware"]).frames(&["Recording"])],
        )
        .emit(
            "Closing",
            vec![p(1.0).acts(&["Thank", "Quit"]).frames(&["Telling"])],
        );
    for (task, slots, frame) in SOFTHARD_RESOLUTION {
        b.emit(task, vec![p(1.0).acts(&["ReportOnAction"]).slots(&slots).frames(&[frame])]);
    }
    let confidence = ConfidenceModel {
        low_prob: 0.0,
        ..ConfidenceModel::default()
    };
    b.build(confidence, 0.0, 200, 10.3)
}

const DIHANA_QUERIES: [(&str, &str, &str); 5] = [
    ("Timetables", "Hour", "Departure-Hour"),
    ("Fares", "Price", "Class"),
    ("TripTime", "Trip-Time", "Arrival-Hour"),
    ("TypesTrain", "Train-Type", "Number-Trains"),
    ("Services", "Services", "Order-Number"),
];

/// Railway information dialogs.
pub fn dihana() -> GeneratorConfig {
    let mut b = Builder::shipped("dihana", "dihana");
    let asks: Vec<String> = DIHANA_QUERIES.iter().map(|(q, _, _)| format!("{q}_query_ask_for_attribute")).collect();
    let uniform_ask: Vec<(&str, f64)> = asks.iter().map(|a| (a.as_str(), 0.2)).collect();
    let mut from_ask = vec![("Confirm_query", 0.3)];
    from_ask.extend(asks.iter().map(|a| (a.as_str(), 0.7 / 5.0)));

    b.go(START, &[("Welcome", 1.0)])
        .go("Welcome", &[("Ask_for_query", 0.7), (asks[0].as_str(), 0.3)])
        .go("Ask_for_query", &from_ask)
        .go("Confirm_query", &uniform_ask)
        .go("Goodbye", &[("Goodbye", 1.0)]);
    b.emit("Welcome", vec![p(0.7).acts(&["Opening"]), p(0.3).acts(&["Opening"]).tiacts(&["Affirmation"])])
        .emit(
            "Ask_for_query",
            vec![
                p(0.5).acts(&["Question"]).slots(&["Origin", "Destination"]),
                p(0.5).acts(&["Question"]).slots(&["Destination", "Departure-Date"]),
            ],
        )
        .emit(
            "Confirm_query",
            vec![
                p(0.7).acts(&["Confirmation"]).tiacts(&["Affirmation"]).slots(&["Trip-Type"]),
                p(0.3).acts(&["Confirmation"]).tiacts(&["Negation"]).slots(&["Trip-Type"]),
            ],
        )
        .emit(
            "Goodbye",
            vec![p(0.6).acts(&["Closing"]), p(0.4).acts(&["Closing"]).tiacts(&["Negation"])],
        )
        .system("Welcome", &["Opening"])
        .system("Ask_for_query", &["New-Query"])
        .system("Confirm_query", &["Confirmation"])
        .system("Goodbye", &["Closing"]);

    for (q, concept, attribute) in DIHANA_QUERIES {
        let ask = format!("{q}_query_ask_for_attribute");
        let confirm = format!("{q}_query_confirm_attribute");
        let provide = format!("{q}_query_provide_results");
        b.go(&ask, &[(ask.as_str(), 0.2), (confirm.as_str(), 0.5), (provide.as_str(), 0.3)])
            .go(&confirm, &[(ask.as_str(), 0.3), (provide.as_str(), 0.7)])
            .go(&provide, &[("Goodbye", 0.6), ("Ask_for_query", 0.4)]);
        b.emit(
            &ask,
            vec![
                p(0.6).acts(&["Question"]).slots(&[concept, attribute]),
                p(0.4).acts(&["Answer"]).slots(&[attribute, "Arrival-Date"]),
            ],
        )
        .emit(
            &confirm,
            vec![
                p(0.6).acts(&["Confirmation"]).slots(&[concept]).tiacts(&["Affirmation"]),
                p(0.3).acts(&["Confirmation"]).slots(&[concept]).tiacts(&["Negation"]),
                p(0.1).acts(&["Undefined"]).tiacts(&["Not-Understood"]),
            ],
        )
        .emit(
            &provide,
            vec![
                p(0.7).acts(&["Acceptance"]).slots(&[concept]),
                p(0.3).acts(&["Acceptance"]).tiacts(&["Affirmation"]),
            ],
        )
        .system(&ask, &["Question"])
        .system(&confirm, &["Confirmation"])
        .system(&provide, &["Answer"]);
    }
    b.build(ConfidenceModel::default(), 0.05, 713, 5.6)
}

/// Bus schedule dialogs.
pub fn letsgo() -> GeneratorConfig {
    let mut b = Builder::shipped("letsgo", "letsgo");
    b.go(START, &[("Welcome", 1.0)])
        .go("Welcome", &[("Ask_for_query", 0.9), ("Ask_for_help", 0.1)])
        .go("Ask_for_help", &[("Provide_instructions", 1.0)])
        .go("Provide_instructions", &[("Ask_for_query", 1.0)])
        .go(
            "Ask_for_query",
            &[("Ask_for_attribute", 0.6), ("Confirm_query", 0.3), ("Error", 0.1)],
        )
        .go(
            "Ask_for_attribute",
            &[("Confirm_attribute", 0.6), ("Ask_for_attribute", 0.3), ("Error", 0.1)],
        )
        .go(
            "Confirm_attribute",
            &[("Ask_for_attribute", 0.4), ("Confirm_query", 0.5), ("Restart_dialog", 0.1)],
        )
        .go("Confirm_query", &[("Looking_up_database", 0.85), ("Query_error", 0.15)])
        .go("Looking_up_database", &[("Provide_results", 1.0)])
        .go("Provide_results", &[("New_query", 0.4), ("Goodbye", 0.6)])
        .go("New_query", &[("Ask_for_query", 1.0)])
        .go("Error", &[("Ask_for_query", 0.5), ("Ask_for_attribute", 0.5)])
        .go("Query_error", &[("Restart_dialog", 0.5), ("Ask_for_attribute", 0.5)])
        .go("Restart_dialog", &[("Ask_for_query", 1.0)])
        .go("Goodbye", &[("Goodbye", 1.0)]);
    b.emit("Welcome", vec![p(1.0).acts(&["meth"])])
        .emit("Ask_for_help", vec![p(1.0).acts(&["disc"]).tiacts(&["Not-Understood"])])
        .emit("Provide_instructions", vec![p(1.0).acts(&["disc"]).tiacts(&["Affirmation"])])
        .emit(
            "Ask_for_query",
            vec![
                p(0.4).acts(&["inform"]).slots(&["from.stop"]),
                p(0.3).acts(&["inform"]).slots(&["from.neighborhood"]),
                p(0.3).acts(&["inform"]).slots(&["from.monument", "to.monument"]),
            ],
        )
        .emit(
            "Ask_for_attribute",
            vec![
                p(0.3).acts(&["inform"]).slots(&["to.stop"]),
                p(0.3).acts(&["inform"]).slots(&["time.hour", "time.period"]),
                p(0.2).acts(&["inform"]).slots(&["time.next"]),
                p(0.2).acts(&["inform"]).slots(&["to.road", "route"]),
            ],
        )
        .emit(
            "Confirm_attribute",
            vec![
                p(0.7).acts(&["yes"]).tiacts(&["Affirmation"]),
                p(0.3).acts(&["no"]).tiacts(&["Negation"]),
            ],
        )
        .emit(
            "Confirm_query",
            vec![p(0.8).acts(&["yes"]).tiacts(&["Affirmation"]).slots(&["time.day"])],
        )
        .emit("Looking_up_database", vec![p(1.0).acts(&["disc"])])
        .emit(
            "Provide_results",
            vec![p(0.6).acts(&["meth"]).slots(&["time.relative"]), p(0.4).acts(&["meth"]).slots(&["time.previous"])],
        )
        .emit("New_query", vec![p(1.0).acts(&["meth"]).slots(&["to.neighborhood"])])
        .emit("Error", vec![p(1.0).acts(&["disc"]).tiacts(&["Not-Understood"]).slots(&["from.road"])])
        .emit("Query_error", vec![p(1.0).acts(&["no"]).tiacts(&["Negation"]).slots(&["time.day"])])
        .emit("Restart_dialog", vec![p(1.0).acts(&["meth"]).tiacts(&["Negation"])])
        .emit("Goodbye", vec![p(1.0).acts(&["meth"]).tiacts(&["Negation"])])
        .system("Welcome", &["formal"])
        .system("Ask_for_query", &["queries"])
        .system("Ask_for_attribute", &["queries"])
        .system("Confirm_attribute", &["queries"])
        .system("Confirm_query", &["queries"])
        .system("Looking_up_database", &["statusreports"])
        .system("Provide_results", &["results"])
        .system("Error", &["error"])
        .system("Query_error", &["error"])
        .system("Ask_for_help", &["instructions"])
        .system("Provide_instructions", &["instructions"])
        .system("Goodbye", &["formal"]);
    b.build(ConfidenceModel::default(), 0.05, 10_415, 11.7)
}

/// Two task pairs told apart only by task-independent acts and one pair
/// only by predicate frames; slots and history carry no information
/// within a pair.
pub fn ablation() -> GeneratorConfig {
    let tasks = ["Start", "A1", "A2", "B1", "B2", "C1", "C2", "End"];
    let mut b = Builder::new("ablation", &tasks, &["sa", "sb", "sc", "se"], &["fc1", "fc2"]);
    b.go(START, &[("Start", 1.0)])
        .go("Start", &[("A1", 0.5), ("A2", 0.5)])
        .go("A1", &[("B1", 0.5), ("B2", 0.5)])
        .go("A2", &[("B1", 0.5), ("B2", 0.5)])
        .go("B1", &[("C1", 0.5), ("C2", 0.5)])
        .go("B2", &[("C1", 0.5), ("C2", 0.5)])
        .go("C1", &[("End", 1.0)])
        .go("C2", &[("End", 1.0)])
        .go("End", &[("End", 1.0)]);
    b.emit("Start", vec![p(1.0).acts(&["Greet"])])
        .emit("A1", vec![p(1.0).acts(&["Answer"]).slots(&["sa"]).tiacts(&["Affirmation"])])
        .emit("A2", vec![p(1.0).acts(&["Answer"]).slots(&["sa"]).tiacts(&["Negation"])])
        .emit("B1", vec![p(1.0).acts(&["Answer"]).slots(&["sb"]).tiacts(&["Affirmation"])])
        .emit("B2", vec![p(1.0).acts(&["Answer"]).slots(&["sb"]).tiacts(&["Negation"])])
        .emit("C1", vec![p(1.0).acts(&["Inform"]).slots(&["sc"]).frames(&["fc1"])])
        .emit("C2", vec![p(1.0).acts(&["Inform"]).slots(&["sc"]).frames(&["fc2"])])
        .emit("End", vec![p(1.0).acts(&["Quit"]).slots(&["se"])]);
    b.build(ConfidenceModel::default(), 0.0, 300, 5.0)
}

/// Every bundled config under its file stem.
pub fn all() -> Vec<(&'static str, GeneratorConfig)> {
    vec![
        ("softhard", softhard()),
        ("softhard-hh", softhard_hh()),
        ("softhard-clean", softhard_clean()),
        ("dihana", dihana()),
        ("letsgo", letsgo()),
        ("ablation", ablation()),
    ]
}

pub fn by_name(name: &str) -> Option<GeneratorConfig> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
