//! Episode trace export. JSONL is lossless (header line, then one record per
//! step); CSV is a flat per-step table for plotting.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use socnav_core::env::{DoneStatus, EpisodeTrace, TraceHeader, TraceRecord};
use socnav_core::geometry::Emotion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("empty trace file")]
    Empty,
}

pub fn write_jsonl<W: Write>(trace: &EpisodeTrace, mut out: W) -> io::Result<()> {
    serde_json::to_writer(&mut out, &trace.header)?;
    out.write_all(b"\n")?;
    for rec in &trace.records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<EpisodeTrace, ExportError> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
        Ok(s) => !s.trim().is_empty(),
        Err(_) => true,
    });
    let (_, first) = lines.next().ok_or(ExportError::Empty)?;
    let header: TraceHeader =
        serde_json::from_str(&first?).map_err(|source| ExportError::Parse { line: 1, source })?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let rec: TraceRecord = serde_json::from_str(&line?)
            .map_err(|source| ExportError::Parse { line: i + 1, source })?;
        records.push(rec);
    }
    Ok(EpisodeTrace { header, records })
}

fn done_str(d: DoneStatus) -> &'static str {
    match d {
        DoneStatus::Running => "running",
        DoneStatus::Goal => "goal",
        DoneStatus::Collision => "collision",
        DoneStatus::Timeout => "timeout",
    }
}

fn emotion_str(e: Emotion) -> &'static str {
    match e {
        Emotion::Happy => "happy",
        Emotion::Neutral => "neutral",
        Emotion::Negative => "negative",
    }
}

pub fn write_csv<W: Write>(trace: &EpisodeTrace, mut out: W) -> io::Result<()> {
    let n_peds = trace.header.initial_pedestrians.len();
    let mut header = String::from(
        "step,time,robot_x,robot_y,robot_heading,v_loc,u_v,u_dtheta,r_col,r_goal,r_emo,r_total,done",
    );
    for i in 0..n_peds {
        write!(header, ",ped{i}_x,ped{i}_y,ped{i}_vx,ped{i}_vy,ped{i}_emotion").unwrap();
    }
    writeln!(out, "{header}")?;
    for r in &trace.records {
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.time,
            r.robot.position.x,
            r.robot.position.y,
            r.robot.heading,
            r.v_loc,
            r.action.u_v,
            r.action.u_dtheta,
            r.reward.r_col,
            r.reward.r_goal,
            r.reward.r_emo,
            r.reward.total,
            done_str(r.done),
        );
        for p in &r.pedestrians {
            write!(
                row,
                ",{},{},{},{},{}",
                p.position.x,
                p.position.y,
                p.velocity.x,
                p.velocity.y,
                emotion_str(p.emotion)
            )
            .unwrap();
        }
        writeln!(out, "{row}")?;
    }
    out.flush()
}

pub fn export<W: Write>(trace: &EpisodeTrace, format: ExportFormat, out: W) -> io::Result<()> {
    match format {
        ExportFormat::Csv => write_csv(trace, out),
        ExportFormat::Jsonl => write_jsonl(trace, out),
    }
}
