//! Degeneration records, markings and old-case lists, with their verification.

pub mod grammar;
pub mod tables;
pub mod verify;

pub use grammar::{parse_degeneration, parse_diagram, DegenerationType, Diagram, Item, Part};
pub use tables::{
    load_table_files, load_tables, DegenerationRecord, GroupInfo, MarkingKind, MarkingRecord, OldCaseRecord, Tables,
};
pub use verify::{
    genus_lookup, packs_into, verify_all, verify_marking_bounds, verify_old_case, verify_record, verify_reduction,
    ReportLine, VerifyOptions,
};
