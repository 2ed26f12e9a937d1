//! stderr logger that also keeps every line for the run's log file.

use std::sync::Mutex;

use log::{Level, LevelFilter, Log, Metadata, Record};

pub struct MirrorLogger {
    level: LevelFilter,
    lines: Mutex<Vec<String>>,
}

static LOGGER: std::sync::OnceLock<MirrorLogger> = std::sync::OnceLock::new();

impl Log for MirrorLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= self.level
    }

    fn log(&self, record: &Record) {
        if !self.enabled(record.metadata()) {
            return;
        }
        let line = format!("[{}] {}", level_tag(record.level()), record.args());
        eprintln!("{line}");
        if let Ok(mut l) = self.lines.lock() {
            l.push(line);
        }
    }

    fn flush(&self) {}
}

fn level_tag(l: Level) -> &'static str {
    match l {
        Level::Error => "error",
        Level::Warn => "warn",
        Level::Info => "info",
        Level::Debug => "debug",
        Level::Trace => "trace",
    }
}

pub fn init(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => LevelFilter::Error,
        (false, 0) => LevelFilter::Warn,
        (false, 1) => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    let logger = LOGGER.get_or_init(|| MirrorLogger {
        level,
        lines: Mutex::new(Vec::new()),
    });
    if log::set_logger(logger).is_ok() {
        log::set_max_level(level);
    }
}

/// Everything logged so far, one line per record.
pub fn captured() -> String {
    let mut out = String::new();
    if let Some(l) = LOGGER.get() {
        if let Ok(lines) = l.lines.lock() {
            for line in lines.iter() {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}
