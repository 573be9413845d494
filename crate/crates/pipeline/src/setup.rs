//! The six training setups and their label spaces.
//!
//! A setup decides which categories the model learns to tell apart;
//! everything else trains as background. Setups 1-3 group pedestrians
//! and cyclists into a single object class (likewise their ghosts);
//! setups 4-6 keep the fine classes. Each setup also fixes the label
//! space evaluation runs in: the grouped view for 1-3, the five fine
//! classes for 4-6, so every model of a triple is scored on the same
//! axes whether or not it was trained on all of them.

use serde::{Deserialize, Serialize};

use radar_core::Label;

use crate::error::PipelineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SetupId {
    /// background, object
    S1,
    /// background, ghost-object
    S2,
    /// background, object, ghost-object
    S3,
    /// background, pedestrian, cyclist
    S4,
    /// background, ghost-pedestrian, ghost-cyclist
    S5,
    /// all five classes
    S6,
}

const GROUPED_CLASSES: &[&str] = &["background", "object", "ghost_object"];
const FINE_CLASSES: &[&str] =
    &["background", "pedestrian", "cyclist", "ghost_pedestrian", "ghost_cyclist"];

impl SetupId {
    pub const ALL: [SetupId; 6] =
        [SetupId::S1, SetupId::S2, SetupId::S3, SetupId::S4, SetupId::S5, SetupId::S6];

    pub fn from_number(n: u8) -> Result<Self, PipelineError> {
        match n {
            1 => Ok(SetupId::S1),
            2 => Ok(SetupId::S2),
            3 => Ok(SetupId::S3),
            4 => Ok(SetupId::S4),
            5 => Ok(SetupId::S5),
            6 => Ok(SetupId::S6),
            other => Err(PipelineError::UnknownSetup(other)),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            SetupId::S1 => 1,
            SetupId::S2 => 2,
            SetupId::S3 => 3,
            SetupId::S4 => 4,
            SetupId::S5 => 5,
            SetupId::S6 => 6,
        }
    }

    /// Whether this setup groups pedestrians and cyclists together.
    pub fn grouped(self) -> bool {
        matches!(self, SetupId::S1 | SetupId::S2 | SetupId::S3)
    }

    /// Ordered training-label list; class 0 is always background.
    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            SetupId::S1 => &["background", "object"],
            SetupId::S2 => &["background", "ghost_object"],
            SetupId::S3 => GROUPED_CLASSES,
            SetupId::S4 => &["background", "pedestrian", "cyclist"],
            SetupId::S5 => &["background", "ghost_pedestrian", "ghost_cyclist"],
            SetupId::S6 => FINE_CLASSES,
        }
    }

    pub fn class_count(self) -> usize {
        self.class_names().len()
    }

    /// Training class of a ground-truth label: categories the setup does
    /// not use fall into background (class 0).
    pub fn train_class(self, label: Label) -> usize {
        let label = label.to_trainable();
        match self {
            SetupId::S1 => match label {
                Label::Pedestrian | Label::Cyclist => 1,
                _ => 0,
            },
            SetupId::S2 => match label {
                Label::GhostPedestrian | Label::GhostCyclist => 1,
                _ => 0,
            },
            SetupId::S3 => match label {
                Label::Pedestrian | Label::Cyclist => 1,
                Label::GhostPedestrian | Label::GhostCyclist => 2,
                _ => 0,
            },
            SetupId::S4 => match label {
                Label::Pedestrian => 1,
                Label::Cyclist => 2,
                _ => 0,
            },
            SetupId::S5 => match label {
                Label::GhostPedestrian => 1,
                Label::GhostCyclist => 2,
                _ => 0,
            },
            SetupId::S6 => match label {
                Label::Pedestrian => 1,
                Label::Cyclist => 2,
                Label::GhostPedestrian => 3,
                Label::GhostCyclist => 4,
                _ => 0,
            },
        }
    }

    /// Label space evaluation runs in: grouped for setups 1-3, fine for
    /// 4-6. A superset of the training classes.
    pub fn eval_class_names(self) -> &'static [&'static str] {
        if self.grouped() {
            GROUPED_CLASSES
        } else {
            FINE_CLASSES
        }
    }

    /// Evaluation class of a ground-truth label.
    pub fn eval_class(self, label: Label) -> usize {
        let label = label.to_trainable();
        if self.grouped() {
            match label {
                Label::Pedestrian | Label::Cyclist => 1,
                Label::GhostPedestrian | Label::GhostCyclist => 2,
                _ => 0,
            }
        } else {
            match label {
                Label::Pedestrian => 1,
                Label::Cyclist => 2,
                Label::GhostPedestrian => 3,
                Label::GhostCyclist => 4,
                _ => 0,
            }
        }
    }

    /// Where a training-class prediction lands in the evaluation space.
    pub fn eval_class_of_prediction(self, train_class: usize) -> usize {
        debug_assert!(train_class < self.class_count());
        match self {
            // background, ghost_object -> background, _, ghost_object
            SetupId::S2 => [0, 2][train_class],
            // background, ghost_ped, ghost_cyc -> slots 0, 3, 4
            SetupId::S5 => [0, 3, 4][train_class],
            // Everything else predicts directly into its eval space.
            _ => train_class,
        }
    }

    /// Evaluation classes that denote real (non-ghost) objects.
    pub fn real_object_eval_classes(self) -> &'static [usize] {
        if self.grouped() {
            &[1]
        } else {
            &[1, 2]
        }
    }

    /// Evaluation classes that denote ghosts.
    pub fn ghost_eval_classes(self) -> &'static [usize] {
        if self.grouped() {
            &[2]
        } else {
            &[3, 4]
        }
    }
}

impl TryFrom<u8> for SetupId {
    type Error = PipelineError;
    fn try_from(n: u8) -> Result<Self, Self::Error> {
        SetupId::from_number(n)
    }
}

impl From<SetupId> for u8 {
    fn from(s: SetupId) -> u8 {
        s.number()
    }
}

impl std::fmt::Display for SetupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "setup {}", self.number())
    }
}

/// Training class index for every point's ground-truth label.
pub fn remap_labels(labels: &[Label], setup: SetupId) -> Vec<usize> {
    labels.iter().map(|&l| setup.train_class(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_setups_with_expected_class_lists() {
        assert_eq!(SetupId::ALL.len(), 6);
        assert_eq!(SetupId::S1.class_names(), &["background", "object"]);
        assert_eq!(SetupId::S2.class_names(), &["background", "ghost_object"]);
        assert_eq!(SetupId::S3.class_names(), &["background", "object", "ghost_object"]);
        assert_eq!(SetupId::S4.class_names(), &["background", "pedestrian", "cyclist"]);
        assert_eq!(
            SetupId::S5.class_names(),
            &["background", "ghost_pedestrian", "ghost_cyclist"]
        );
        assert_eq!(SetupId::S6.class_names(), FINE_CLASSES);
        for s in SetupId::ALL {
            assert_eq!(SetupId::from_number(s.number()).unwrap(), s);
        }
        assert!(SetupId::from_number(0).is_err());
        assert!(SetupId::from_number(7).is_err());
    }

    #[test]
    fn out_of_setup_categories_become_background() {
        // Ghosts are background to a real-object-only model.
        assert_eq!(SetupId::S1.train_class(Label::GhostPedestrian), 0);
        assert_eq!(SetupId::S1.train_class(Label::GhostCyclist), 0);
        // Real objects are background to a ghost-only model.
        assert_eq!(SetupId::S2.train_class(Label::Pedestrian), 0);
        assert_eq!(SetupId::S5.train_class(Label::Cyclist), 0);
        // Ghosts group regardless of species in setups 2-3.
        assert_eq!(SetupId::S2.train_class(Label::GhostCyclist), 1);
        assert_eq!(SetupId::S3.train_class(Label::GhostPedestrian), 2);
    }

    #[test]
    fn grouping_merges_pedestrian_and_cyclist() {
        assert_eq!(SetupId::S1.train_class(Label::Pedestrian), 1);
        assert_eq!(SetupId::S1.train_class(Label::Cyclist), 1);
        assert_eq!(SetupId::S3.train_class(Label::Pedestrian), 1);
        assert_eq!(SetupId::S3.train_class(Label::Cyclist), 1);
    }

    #[test]
    fn setup_six_is_the_identity_on_all_five_classes() {
        let labels = [
            Label::Background,
            Label::Pedestrian,
            Label::Cyclist,
            Label::GhostPedestrian,
            Label::GhostCyclist,
        ];
        for (i, &l) in labels.iter().enumerate() {
            assert_eq!(SetupId::S6.train_class(l), i);
            assert_eq!(SetupId::S6.class_names()[i], l.name());
        }
    }

    #[test]
    fn debug_bounce_label_trains_as_background_everywhere() {
        for s in SetupId::ALL {
            assert_eq!(s.train_class(Label::Type1SecondBounce), 0);
            assert_eq!(s.eval_class(Label::Type1SecondBounce), 0);
        }
    }

    #[test]
    fn remap_is_surjective_onto_the_setup_classes() {
        let all = Label::ALL;
        for s in SetupId::ALL {
            let mapped = remap_labels(&all, s);
            for class in 0..s.class_count() {
                assert!(mapped.contains(&class), "{s}: class {class} unreachable");
            }
            assert!(mapped.iter().all(|&c| c < s.class_count()));
        }
    }

    #[test]
    fn prediction_mapping_into_eval_space_is_injective_and_name_stable() {
        for s in SetupId::ALL {
            let eval_names = s.eval_class_names();
            let mut seen = std::collections::BTreeSet::new();
            for (train_idx, name) in s.class_names().iter().enumerate() {
                let eval_idx = s.eval_class_of_prediction(train_idx);
                // The class keeps its name across the mapping.
                assert_eq!(&eval_names[eval_idx], name, "{s}");
                assert!(seen.insert(eval_idx), "{s}: eval class hit twice");
            }
        }
    }

    #[test]
    fn truth_and_prediction_agree_on_shared_classes() {
        // A correct prediction must land on the truth's eval class.
        for s in SetupId::ALL {
            for &label in &Label::TRAINABLE {
                let train = s.train_class(label);
                if train != 0 {
                    assert_eq!(s.eval_class_of_prediction(train), s.eval_class(label), "{s}");
                }
            }
        }
    }

    #[test]
    fn real_and_ghost_eval_classes_partition_non_background() {
        for s in SetupId::ALL {
            let real = s.real_object_eval_classes();
            let ghost = s.ghost_eval_classes();
            let names = s.eval_class_names();
            for &c in real {
                assert!(!names[c].starts_with("ghost"));
            }
            for &c in ghost {
                assert!(names[c].starts_with("ghost"));
            }
            assert_eq!(real.len() + ghost.len() + 1, names.len());
        }
    }

    #[test]
    fn setup_serde_round_trips_as_numbers() {
        for s in SetupId::ALL {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, s.number().to_string());
            let back: SetupId = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
        }
        assert!(serde_json::from_str::<SetupId>("9").is_err());
    }
}
