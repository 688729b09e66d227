use cckp::instances::{
    format_instance, generate, load_instance, parse_instance, save_instance, Family,
    GeneratorConfig, Instance,
};
use proptest::prelude::*;

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..60).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.001f64..1e6, n),
            proptest::collection::vec(0.001f64..1e6, n),
            0.001f64..1e7,
            "[a-z][a-z0-9 _-]{0,20}",
        )
            .prop_map(|(p, a, c, label)| Instance::new(p, a, c, Family::Custom, &label).unwrap())
    })
}

proptest! {
    #[test]
    fn text_round_trip_is_exact(inst in instance_strategy()) {
        let back = parse_instance(&format_instance(&inst)).unwrap();
        prop_assert_eq!(back, inst);
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for family in [Family::Uncorrelated, Family::BoundedStronglyCorrelated] {
        let inst = generate(family, &GeneratorConfig::new(100, 1000, 0.25, 9)).unwrap();
        let path = dir.path().join(format!("{family}.txt"));
        save_instance(&inst, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), inst);
    }
}
