use std::sync::Arc;
use std::thread;

use roboto_core::catalog::{entry_id, Catalog, CatalogError};
use roboto_core::corpus;

fn open() -> (tempfile::TempDir, Catalog) {
    let dir = tempfile::tempdir().unwrap();
    let catalog = Catalog::open(dir.path()).unwrap();
    (dir, catalog)
}

#[test]
fn fresh_catalog_holds_the_four_builtins() {
    let (_dir, catalog) = open();
    let entries = catalog.list();
    assert_eq!(entries.len(), 4);
    assert!(entries.iter().all(|e| e.builtin));
    let tdd = entries.iter().find(|e| e.name == "testDrivenDevelopment").unwrap();
    assert!(tdd.summary.starts_with("This is a strategy for doing design"));
}

#[test]
fn ingest_is_idempotent_by_content() {
    let (_dir, catalog) = open();
    let a = catalog.ingest(corpus::RENAME_VARIABLE).unwrap();
    let b = catalog.ingest(corpus::RENAME_VARIABLE).unwrap();
    assert_eq!(a.id, b.id);
    assert_eq!(a.id, entry_id(corpus::RENAME_VARIABLE));
    assert_eq!(catalog.list().len(), 4);
}

#[test]
fn debug_entry_lists_both_strategies() {
    let (_dir, catalog) = open();
    let entry = catalog.ingest(corpus::DEBUG).unwrap();
    assert_eq!(entry.strategy_names, ["debug", "localizeWrongValue"]);
}

#[test]
fn get_returns_original_bytes() {
    let (_dir, catalog) = open();
    let text = "# odd   spacing kept\nstrategy  s ( a )\n    do t( 'a' )\nSTRATEGY t (b)\n    Act.\n";
    let entry = catalog.ingest(text).unwrap();
    let (_, stored) = catalog.get(&entry.id).unwrap();
    assert_eq!(stored, text);
    assert_eq!(entry.name, "s");
    assert_eq!(entry.path, format!("strategies/s-{}.roboto", entry.id));
}

#[test]
fn errors() {
    let (_dir, catalog) = open();
    let e = catalog.ingest("STRATEGY s ()\n  DO missing('x')\n").unwrap_err();
    assert_eq!(e.code(), "ValidationFailed");
    assert!(e.diagnostics().iter().any(|d| d.is_error() && d.code.as_str() == "UnknownStrategy"));
    let e = catalog.ingest("STRATEGY s ()\n\tA\n  B\n").unwrap_err();
    assert_eq!(e.code(), "ParseFailed");
    assert!(matches!(catalog.get("0000"), Err(CatalogError::NotFound(_))));
    let builtin = catalog.list()[0].id.clone();
    assert!(matches!(catalog.remove(&builtin), Err(CatalogError::ReadOnly(_))));
}

#[test]
fn survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let id = {
        let catalog = Catalog::open(dir.path()).unwrap();
        catalog.ingest("STRATEGY kept ()\n  A\n").unwrap().id
    };
    let catalog = Catalog::open(dir.path()).unwrap();
    assert_eq!(catalog.entry(&id).unwrap().name, "kept");
    assert_eq!(catalog.list().len(), 5);
    catalog.remove(&id).unwrap();
    let catalog = Catalog::open(dir.path()).unwrap();
    assert_eq!(catalog.list().len(), 4);
}

#[test]
fn corrupt_index_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    Catalog::open(dir.path()).unwrap();
    std::fs::write(dir.path().join("index.json"), "{not json").unwrap();
    assert_eq!(Catalog::open(dir.path()).unwrap_err().code(), "CorruptIndex");
}

#[test]
fn concurrent_ingests_all_land() {
    let (dir, catalog) = open();
    let catalog = Arc::new(catalog);
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let catalog = catalog.clone();
            thread::spawn(move || catalog.ingest(&format!("STRATEGY s{i} ()\n  Step {i}\n")).unwrap())
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert_eq!(catalog.list().len(), 12);
    let reopened = Catalog::open(dir.path()).unwrap();
    assert_eq!(reopened.list(), catalog.list());
}
