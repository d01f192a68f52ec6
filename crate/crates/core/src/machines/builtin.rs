//! The machines used for inference, built from [`MachineParams`].

use super::builder::{MachineBuilder, StateId};
use super::charclass::CharClass;
use super::params::{MachineParams, MissingVocabulary};
use super::{MachineLabel, TypeMachine};
use crate::error::Result;
use crate::types::BaseType;

const MONTHS: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// The six machines plus the vocabulary the missing machine was built from.
#[derive(Debug, Clone)]
pub struct MachineSet {
    machines: [TypeMachine; 6],
    vocabulary: MissingVocabulary,
    params: MachineParams,
}

/// Log-likelihood of one value under each machine, indexed by label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueLikelihoods([f64; 6]);

impl ValueLikelihoods {
    pub fn get(&self, label: MachineLabel) -> f64 {
        self.0[label as usize]
    }

    pub fn base(&self, t: BaseType) -> f64 {
        self.get(t.into())
    }
}

impl MachineSet {
    pub fn new(params: MachineParams) -> Result<Self> {
        params.validate()?;
        let machines = [
            date_machine(),
            float_machine(&params),
            integer_machine(&params),
            string_machine(&params),
            missing_machine(&params.missing_values),
            anomaly_machine(&params),
        ];
        Ok(Self {
            machines,
            vocabulary: params.missing_values.clone(),
            params,
        })
    }

    pub fn machine(&self, label: MachineLabel) -> &TypeMachine {
        &self.machines[label as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TypeMachine> {
        self.machines.iter()
    }

    pub fn vocabulary(&self) -> &MissingVocabulary {
        &self.vocabulary
    }

    pub fn params(&self) -> &MachineParams {
        &self.params
    }

    pub fn likelihoods(&self, value: &str) -> ValueLikelihoods {
        ValueLikelihoods(std::array::from_fn(|i| self.machines[i].log_prob(value)))
    }
}

impl Default for MachineSet {
    fn default() -> Self {
        builtin_machines()
    }
}

/// Machines built from the default parameters.
pub fn builtin_machines() -> MachineSet {
    MachineSet::new(MachineParams::default()).expect("default parameters are valid")
}

fn optional(b: &mut MachineBuilder, from: StateId, class: CharClass, to: StateId, p: f64) {
    if p > 0.0 {
        b.emit(from, class, to, p);
    }
    b.epsilon(from, to, 1.0 - p);
}

/// Optional space and sign; returns the state expecting the first digit.
fn numeric_prefix(b: &mut MachineBuilder, p: &MachineParams) -> (StateId, StateId) {
    let start = b.state("start");
    let signed = b.state("pre_sign");
    let body = b.state("body");
    optional(b, start, CharClass::Literal(' '), signed, p.numeric_space);
    optional(b, signed, CharClass::Sign, body, p.sign);
    (start, body)
}

/// Optional trailing space, then stop.
fn numeric_suffix(b: &mut MachineBuilder, p: &MachineParams, tail: StateId) {
    let padded = b.state("padded");
    if p.numeric_space > 0.0 {
        b.emit(tail, CharClass::Literal(' '), padded, p.numeric_space);
    }
    b.stop(tail, 1.0 - p.numeric_space);
    b.stop(padded, 1.0);
}

fn integer_machine(p: &MachineParams) -> TypeMachine {
    let mut b = MachineBuilder::new();
    let (start, body) = numeric_prefix(&mut b, p);
    let digits = b.state("digits");
    let tail = b.state("tail");
    b.emit(body, CharClass::Digit, digits, 1.0);
    b.emit(digits, CharClass::Digit, digits, p.integer_continue);
    b.epsilon(digits, tail, 1.0 - p.integer_continue);
    numeric_suffix(&mut b, p, tail);
    b.build(MachineLabel::Integer, start)
}

fn float_machine(p: &MachineParams) -> TypeMachine {
    let mut b = MachineBuilder::new();
    let (start, body) = numeric_prefix(&mut b, p);
    let int_digits = b.state("int_digits");
    let frac = b.state("frac");
    let bare_point = b.state("bare_point");
    let exp = b.state("exp");
    let exp_sign = b.state("exp_sign");
    let exp_digits = b.state("exp_digits");
    let tail = b.state("tail");

    b.emit(body, CharClass::Digit, int_digits, 1.0 - p.float_leading_dot);
    b.emit(body, CharClass::Literal('.'), bare_point, p.float_leading_dot);
    b.emit(int_digits, CharClass::Digit, int_digits, p.float_int_digit);
    b.emit(int_digits, CharClass::Literal('.'), frac, p.float_point);
    b.epsilon(int_digits, exp, 1.0 - p.float_int_digit - p.float_point);
    b.emit(bare_point, CharClass::Digit, frac, 1.0);
    b.emit(frac, CharClass::Digit, frac, p.float_frac_digit);
    b.epsilon(frac, exp, 1.0 - p.float_frac_digit);

    let exp_marker = b.state("exp_marker");
    if p.float_exponent > 0.0 {
        b.emit(exp, CharClass::Exponent, exp_marker, p.float_exponent);
    }
    b.epsilon(exp, tail, 1.0 - p.float_exponent);
    optional(&mut b, exp_marker, CharClass::Sign, exp_sign, p.float_exponent_sign);
    b.emit(exp_sign, CharClass::Digit, exp_digits, 1.0);
    b.emit(exp_digits, CharClass::Digit, exp_digits, p.float_exponent_continue);
    b.epsilon(exp_digits, tail, 1.0 - p.float_exponent_continue);

    numeric_suffix(&mut b, p, tail);
    b.build(MachineLabel::Float, start)
}

fn range(lo: u32, hi: u32, width: usize) -> Vec<String> {
    (lo..=hi).map(|v| format!("{v:0width$}")).collect()
}

fn with_unpadded(lo: u32, hi: u32) -> Vec<String> {
    let mut v = range(lo, hi, 2);
    v.extend(range(lo, hi, 1));
    v.sort();
    v.dedup();
    v
}

/// Date templates, each a sequence of slots; a slot is a set of strings.
fn date_templates() -> Vec<(&'static str, Vec<Vec<String>>)> {
    let year = range(1800, 2100, 4);
    let month = range(1, 12, 2);
    let day = range(1, 31, 2);
    let loose_month = with_unpadded(1, 12);
    let loose_day = with_unpadded(1, 31);
    let hour = range(0, 23, 2);
    let minute = range(0, 59, 2);
    let names: Vec<String> = MONTHS.iter().map(|m| m.to_string()).collect();
    let lit = |s: &str| vec![s.to_string()];
    let time = |sep: &str| {
        vec![
            lit(sep),
            hour.clone(),
            lit(":"),
            minute.clone(),
            lit(":"),
            minute.clone(),
        ]
    };
    let iso = vec![
        year.clone(),
        lit("-"),
        month.clone(),
        lit("-"),
        day.clone(),
    ];

    let mut iso_t = iso.clone();
    iso_t.extend(time("T"));
    let mut iso_space = iso.clone();
    iso_space.extend(time(" "));
    let mut clock = time("");
    clock.remove(0);

    vec![
        ("iso", iso),
        ("iso_t", iso_t),
        ("iso_space", iso_space),
        (
            "dmy",
            vec![
                loose_day.clone(),
                lit("/"),
                loose_month.clone(),
                lit("/"),
                year.clone(),
            ],
        ),
        (
            "mdy",
            vec![
                loose_month,
                lit("/"),
                loose_day.clone(),
                lit("/"),
                year.clone(),
            ],
        ),
        (
            "day_name",
            vec![
                loose_day.clone(),
                lit(" "),
                names.clone(),
                lit(" "),
                year.clone(),
            ],
        ),
        (
            "name_day",
            vec![names.clone(), lit(" "), loose_day, lit(" "), year.clone()],
        ),
        ("month_name", vec![names]),
        ("year", vec![year]),
        ("clock", clock),
    ]
}

fn date_machine() -> TypeMachine {
    let mut b = MachineBuilder::new();
    let start = b.state("start");
    let end = b.state("end");
    b.stop(end, 1.0);
    let templates = date_templates();
    let weight = 1.0 / templates.len() as f64;
    for (name, slots) in templates {
        let mut cur = start;
        let mut prob = weight;
        for (i, slot) in slots.iter().enumerate() {
            let next = if i + 1 == slots.len() {
                end
            } else {
                b.state(format!("{name}{i}"))
            };
            b.choice(cur, slot, next, prob);
            cur = next;
            prob = 1.0;
        }
    }
    b.build(MachineLabel::Date, start)
}

fn string_machine(p: &MachineParams) -> TypeMachine {
    let mut b = MachineBuilder::new();
    let start = b.state("start");
    let text = b.state("text");
    b.emit(start, CharClass::Printable, text, 1.0);
    b.emit(text, CharClass::Printable, text, p.string_continue);
    b.stop(text, 1.0 - p.string_continue);
    b.build(MachineLabel::String, start)
}

fn missing_machine(vocabulary: &MissingVocabulary) -> TypeMachine {
    let mut b = MachineBuilder::new();
    let start = b.state("start");
    let end = b.state("end");
    b.stop(end, 1.0);
    let entries: Vec<String> = vocabulary.iter().map(str::to_string).collect();
    b.choice(start, &entries, end, 1.0);
    b.build(MachineLabel::Missing, start)
}

fn anomaly_machine(p: &MachineParams) -> TypeMachine {
    let mut b = MachineBuilder::new();
    let start = b.state("start");
    b.emit(start, CharClass::Any, start, p.anomaly_continue);
    b.stop(start, 1.0 - p.anomaly_continue);
    b.build(MachineLabel::Anomaly, start)
}
