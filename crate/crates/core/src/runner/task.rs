use std::collections::BTreeMap;

use super::config::Task;
use crate::error::{Error, Result};
use crate::featurestore::LabelVector;
use crate::svm::LabelMap;

/// Binary id given to rows that take part in neither side of the task.
pub const EXCLUDED: u32 = 2;

/// Source labels mapped onto a binary task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskLabels {
    pub task: Task,
    /// Source rows that belong to the task, ascending.
    pub rows: Vec<usize>,
    /// One id per source row: 0 negative, 1 positive, [`EXCLUDED`] otherwise.
    pub binary: LabelVector,
    pub label_map: LabelMap,
}

fn require(labels: &LabelVector, name: &str) -> Result<u32> {
    labels.class_id(name).ok_or_else(|| {
        Error::invalid(format!(
            "task needs a class named {name:?}; classes are {:?}",
            labels.class_names().values().collect::<Vec<_>>()
        ))
    })
}

/// Classes are found by name. For normal vs pneumonia every class other
/// than "normal" joins the pneumonia side.
pub fn task_labels(task: Task, labels: &LabelVector) -> Result<TaskLabels> {
    let side: Box<dyn Fn(u32) -> Option<u32>> = match task {
        Task::NormalVsPneumonia => {
            let normal = require(labels, "normal")?;
            if labels.class_names().len() < 2 {
                return Err(Error::invalid("normal vs pneumonia needs at least one pneumonia class"));
            }
            Box::new(move |c| Some(u32::from(c != normal)))
        }
        Task::ViralVsBacterial => {
            let bacterial = require(labels, "bacterial")?;
            let viral = require(labels, "viral")?;
            Box::new(move |c| {
                if c == viral {
                    Some(1)
                } else if c == bacterial {
                    Some(0)
                } else {
                    None
                }
            })
        }
    };
    let ids: Vec<u32> = labels.labels().iter().map(|&c| side(c).unwrap_or(EXCLUDED)).collect();
    let rows = (0..ids.len()).filter(|&i| ids[i] != EXCLUDED).collect();
    let [neg, pos] = task.outcome_names();
    let names = BTreeMap::from([(0, neg.to_string()), (1, pos.to_string()), (EXCLUDED, "excluded".to_string())]);
    Ok(TaskLabels { task, rows, binary: LabelVector::new(ids, names)?, label_map: LabelMap { negative: 0, positive: 1 } })
}
