# Approximate At-Most-k Toolkit - Test Suite
