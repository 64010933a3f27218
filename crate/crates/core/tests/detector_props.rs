use proptest::prelude::*;
use tfsmell_core::detect::{detect_directory, DetectorConfig};
use tfsmell_core::hcl::{parse, ConfigFile};
use tfsmell_core::{SmellFinding, SmellId};

fn resource() -> impl Strategy<Value = String> {
    let name = "[a-z]{1,6}";
    prop_oneof![
        (name, 0u32..8, prop::sample::select(vec!["m5.large", "m5.4xlarge", "c5.9xlarge", "t3.micro"])).prop_map(
            |(n, count, size)| format!("resource \"aws_instance\" \"{n}\" {{\n  count = {count}\n  instance_type = \"{size}\"\n}}\n")
        ),
        (name, prop::option::of(prop::sample::select(vec![7u32, 30, 90, 91, 365, 3653]))).prop_map(|(n, days)| match days {
            Some(d) => format!("resource \"aws_cloudwatch_log_group\" \"{n}\" {{\n  retention_in_days = {d}\n}}\n"),
            None => format!("resource \"aws_cloudwatch_log_group\" \"{n}\" {{\n  name = \"{n}\"\n}}\n"),
        }),
        (name, any::<bool>()).prop_map(|(n, lc)| {
            let lifecycle = if lc { "  lifecycle {\n    prevent_destroy = true\n  }\n" } else { "" };
            format!("resource \"aws_ebs_volume\" \"{n}\" {{\n  size = 40\n{lifecycle}}}\n")
        }),
        (name, prop::sample::select(vec!["us-west1-a", "us-west1-b", "europe-west1-c"]), prop::option::of(name)).prop_map(
            |(n, zone, peer)| {
                let r = peer.map(|p| format!("  network = google_compute_instance.{p}.self_link\n")).unwrap_or_default();
                format!("resource \"google_compute_instance\" \"{n}\" {{\n  zone = \"{zone}\"\n{r}}}\n")
            }
        ),
        (name, prop::sample::select(vec!["Standard_D16s_v3", "Standard_B2s"])).prop_map(|(n, size)| format!(
            "resource \"azurerm_virtual_machine\" \"{n}\" {{\n  vm_size = \"{size}\"\n}}\n"
        )),
        name.prop_map(|n| format!("resource \"random_id\" \"{n}\" {{\n  byte_length = 8\n}}\n")),
    ]
}

fn terraform_block() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "",
        "terraform {\n  required_version = \">= 1.0\"\n}\n",
        "terraform {\n  backend \"local\" {\n    path = \"x\"\n  }\n}\n",
        "terraform {\n  backend \"s3\" {\n    bucket = \"b\"\n  }\n}\n",
    ])
    .prop_map(String::from)
}

fn file_text() -> impl Strategy<Value = String> {
    (terraform_block(), prop::collection::vec(resource(), 0..16)).prop_map(|(tf, rs)| format!("{tf}{}", rs.concat()))
}

fn local(findings: &[SmellFinding], path: &str) -> Vec<SmellFinding> {
    findings.iter().filter(|f| f.path == path && f.smell != SmellId::SS6).cloned().collect()
}

fn ss7_count(findings: &[SmellFinding]) -> Option<u64> {
    findings.iter().find(|f| f.smell == SmellId::SS7).map(|f| f.evidence.parse().unwrap())
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn unrelated_files_do_not_change_local_findings(a in file_text(), b in file_text()) {
        let cfg = DetectorConfig::default();
        let fa = parse(&a, "a.tf");
        let alone = detect_directory(std::slice::from_ref(&fa), &cfg);
        let together = detect_directory(&[fa, parse(&b, "b.tf")], &cfg);
        prop_assert_eq!(local(&alone, "a.tf"), local(&together, "a.tf"));
    }

    #[test]
    fn appending_a_resource_never_lowers_the_count(a in file_text(), extra in resource()) {
        let cfg = DetectorConfig::default();
        let before = parse(&a, "a.tf");
        let n_before = before.blocks().filter(|b| b.block_type == "resource").count() as u64;
        let after = detect_directory(&[parse(&format!("{a}{extra}"), "a.tf")], &cfg);
        let before = detect_directory(&[before], &cfg);
        let b = ss7_count(&before).unwrap_or(0);
        let c = ss7_count(&after).unwrap_or(n_before + 1);
        prop_assert!(c >= b);
        if let Some(b) = ss7_count(&before) {
            prop_assert_eq!(ss7_count(&after), Some(b + 1));
        }
    }

    #[test]
    fn autoscaler_removes_ss1_and_ss2(a in file_text()) {
        let cfg = DetectorConfig::default();
        let text = format!("{a}resource \"aws_autoscaling_group\" \"asg\" {{\n  max_size = 4\n}}\n");
        let out = detect_directory(&[parse(&text, "a.tf")], &cfg);
        prop_assert!(out.iter().all(|f| f.smell != SmellId::SS1 && f.smell != SmellId::SS2));
    }

    #[test]
    fn spans_hold_their_evidence(a in file_text(), b in file_text()) {
        let cfg = DetectorConfig::default();
        let files = [parse(&a, "a.tf"), parse(&b, "b.tf")];
        let texts = [&a, &b];
        for f in detect_directory(&files, &cfg) {
            prop_assert!(!f.evidence.is_empty());
            let i = if f.path == "a.tf" { 0 } else { 1 };
            let file: &ConfigFile = &files[i];
            prop_assert!(file.span.contains(&f.span));
            if f.span == file.span || f.evidence == "unset" || f.evidence == "no backend" {
                continue;
            }
            let slice = f.span.slice(texts[i]);
            prop_assert!(squash(slice).contains(&squash(&f.evidence)), "{:?} not in {:?}", f.evidence, slice);
        }
    }

    #[test]
    fn raising_the_ss7_threshold_never_adds_findings(texts in prop::collection::vec(file_text(), 1..5), t in 1u64..20) {
        let files: Vec<ConfigFile> = texts.iter().enumerate().map(|(i, t)| parse(t, &format!("f{i}.tf"))).collect();
        let count = |threshold| {
            let cfg = DetectorConfig { ss7_max_resources_per_file: threshold, ..DetectorConfig::default() };
            detect_directory(&files, &cfg).iter().filter(|f| f.smell == SmellId::SS7).count()
        };
        prop_assert!(count(t + 1) <= count(t));
    }

    #[test]
    fn detection_is_deterministic(a in file_text()) {
        let cfg = DetectorConfig::default();
        let f = [parse(&a, "a.tf")];
        prop_assert_eq!(detect_directory(&f, &cfg), detect_directory(&f, &cfg));
    }
}

#[test]
fn custom_ss7_threshold() {
    let text: String = (0..6).map(|i| format!("resource \"t_x\" \"r{i}\" {{\n}}\n")).collect();
    let f = [parse(&text, "six.tf")];
    let strict = DetectorConfig { ss7_max_resources_per_file: 5, ..DetectorConfig::default() };
    assert_eq!(ss7_count(&detect_directory(&f, &strict)), Some(6));
    assert_eq!(ss7_count(&detect_directory(&f, &DetectorConfig::default())), None);
}

#[test]
fn directory_scope_suppression() {
    use tfsmell_core::detect::SuppressionScope;
    let vm = parse("resource \"aws_instance\" \"a\" {\n  count = 3\n}\n", "vm.tf");
    let asg = parse("resource \"aws_autoscaling_group\" \"g\" {\n  max_size = 3\n}\n", "asg.tf");
    let files = [vm, asg];
    let file_scope = detect_directory(&files, &DetectorConfig::default());
    assert!(file_scope.iter().any(|f| f.smell == SmellId::SS2));
    let dir = DetectorConfig { autoscaler_scope: SuppressionScope::Directory, ..DetectorConfig::default() };
    assert!(detect_directory(&files, &dir).iter().all(|f| f.smell != SmellId::SS2));
}
