//! Dataset loading, synthetic generators and text formats.

pub mod generate;
pub mod table;
pub mod text;
pub mod tudataset;

pub use generate::{generate, GeneratorSpec, GraphKind};
pub use table::{read_reports_file, write_reports_file, write_summaries};
pub use text::{format_graph, format_result, parse_graph, parse_result, read_graph, read_result, write_graph, write_result};
pub use tudataset::{detect_name, load_tudataset, Dataset};
