def test_import():
    import powershade
