//! The strategies shipped with the toolchain.

pub const RENAME_VARIABLE: &str = include_str!("../corpus/renameVariable.roboto");
pub const TOWER_OF_HANOI: &str = include_str!("../corpus/towerOfHanoi.roboto");
pub const TEST_DRIVEN_DEVELOPMENT: &str = include_str!("../corpus/testDrivenDevelopment.roboto");
pub const DEBUG: &str = include_str!("../corpus/debug.roboto");

/// Tower of Hanoi with the move taken out of the first conditional, so that
/// every level moves a disc.
pub const TOWER_OF_HANOI_CORRECTED: &str =
    include_str!("../corpus/variants/towerOfHanoiCorrected.roboto");

/// File name and text of each built-in catalog entry.
pub const BUILTIN: [(&str, &str); 4] = [
    ("renameVariable.roboto", RENAME_VARIABLE),
    ("towerOfHanoi.roboto", TOWER_OF_HANOI),
    ("testDrivenDevelopment.roboto", TEST_DRIVEN_DEVELOPMENT),
    ("debug.roboto", DEBUG),
];
