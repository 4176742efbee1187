//! Constructive hardness reductions.

pub mod formula;
pub mod incidence;
pub mod tdm;

pub use formula::{
    build_3binary_tree, build_gadget_gd, check_gadget_graph, formula_to_graph, gadget_depth, ClauseGadgets, CnfFormula,
    GadgetGd, GadgetRegistry, Hub, Literal, S5Gadget, SharedAttachment, ThreeBinaryTree, VariableGadget,
};
pub use incidence::{graph_to_incidence_db, tripartite_to_2div, tripartite_to_3div};
pub use tdm::{map_3dm_solution, tdm3_to_db27, Side, ThreeDmInstance, ThreeDmMapping};
